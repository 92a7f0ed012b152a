#include "pwref/rng.hpp"

#include <sodium.h>

#include <algorithm>
#include <string>

namespace pwref {

namespace {

void ensure_sodium() {
    if (sodium_init() < 0) {
        throw std::runtime_error("libsodium initialization failed");
    }
}

void store_le64(std::uint64_t value, std::uint8_t* out) {
    for (int i = 0; i < 8; ++i) {
        out[i] = static_cast<std::uint8_t>(value >> (8 * i));
    }
}

}  // namespace

std::vector<std::uint8_t> ByteSource::next_bytes(std::size_t count) {
    std::vector<std::uint8_t> out(count);
    fill(out);
    return out;
}

SystemByteSource::SystemByteSource() {
    ensure_sodium();
}

void SystemByteSource::fill(std::span<std::uint8_t> out) {
    randombytes_buf(out.data(), out.size());
}

SeededByteSource::SeededByteSource(std::uint64_t seed, std::uint64_t stream) {
    ensure_sodium();
    store_le64(seed, key_.data());
    store_le64(stream, nonce_.data());
}

void SeededByteSource::refill() {
    if (block_counter_ == ~std::uint32_t{0}) {
        throw std::runtime_error("seeded byte source exhausted its ChaCha20 block counter");
    }
    static constexpr std::array<std::uint8_t, 64> zeros{};
    crypto_stream_chacha20_ietf_xor_ic(block_.data(), zeros.data(), zeros.size(), nonce_.data(), block_counter_,
                                       key_.data());
    ++block_counter_;
    block_pos_ = 0;
}

void SeededByteSource::fill(std::span<std::uint8_t> out) {
    std::size_t written = 0;
    while (written < out.size()) {
        if (block_pos_ == block_.size()) {
            refill();
        }
        const auto take = std::min(out.size() - written, block_.size() - block_pos_);
        std::copy_n(block_.begin() + static_cast<std::ptrdiff_t>(block_pos_), take,
                    out.begin() + static_cast<std::ptrdiff_t>(written));
        block_pos_ += take;
        written += take;
    }
}

ScriptedByteSource::ScriptedByteSource(std::vector<std::uint8_t> script) : script_(std::move(script)) {}

void ScriptedByteSource::fill(std::span<std::uint8_t> out) {
    if (out.size() > remaining()) {
        throw ScriptExhausted("byte script exhausted: wanted " + std::to_string(out.size()) + ", have " +
                              std::to_string(remaining()));
    }
    std::copy_n(script_.begin() + static_cast<std::ptrdiff_t>(pos_), out.size(), out.begin());
    pos_ += out.size();
}

WordWidth::WordWidth(unsigned bits) : bits_(bits) {
    if (bits < 1 || bits > 64) {
        throw std::domain_error("word width must be within [1, 64] bits, got " + std::to_string(bits));
    }
}

std::vector<std::uint8_t> encode_words(std::span<const std::uint64_t> words, WordWidth width) {
    std::vector<std::uint8_t> out;
    out.reserve(words.size() * width.byte_count());
    for (auto word : words) {
        for (std::size_t i = 0; i < width.byte_count(); ++i) {
            out.push_back(static_cast<std::uint8_t>(word >> (8 * i)));
        }
    }
    return out;
}

std::uint64_t word_from_bytes(ByteSource& src, WordWidth width) {
    std::array<std::uint8_t, 8> buf{};
    const auto bytes = std::span(buf).first(width.byte_count());
    src.fill(bytes);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        word |= std::uint64_t{bytes[i]} << (8 * i);
    }
    return word & width.max_word();
}

namespace {

void require_range(std::uint64_t range, WordWidth width) {
    if (!width.admits_range(range)) {
        throw std::domain_error("sampler range " + std::to_string(range) + " outside [1, 2^" +
                                std::to_string(width.bits()) + "]");
    }
}

template <typename Accepts>
std::uint64_t sample_with(ByteSource& src, std::uint64_t range, WordWidth width, Accepts accepts) {
    require_range(range, width);
    for (std::uint64_t attempt = 0; attempt < kRejectionLimit; ++attempt) {
        const auto word = word_from_bytes(src, width);
        if (accepts(word)) {
            return word % range;
        }
    }
    throw RejectionLimitExceeded("rejection sampler gave up after " + std::to_string(kRejectionLimit) +
                                 " consecutive rejections");
}

}  // namespace

std::uint64_t max_accepted(std::uint64_t range, WordWidth width) {
    require_range(range, width);
    const auto top = width.max_word();
    return ((top / range) * range - 1) & top;
}

bool chrome_accepts(std::uint64_t word, std::uint64_t range, WordWidth width) {
    return word <= max_accepted(range, width);
}

bool keepass_accepts(std::uint64_t word, std::uint64_t range, WordWidth width) {
    require_range(range, width);
    return word - word % range <= width.max_word() - (range - 1);
}

std::uint64_t sample_chrome(ByteSource& src, std::uint64_t range, WordWidth width) {
    const auto bound = max_accepted(range, width);
    return sample_with(src, range, width, [bound](std::uint64_t word) { return word <= bound; });
}

std::uint64_t sample_keepass(ByteSource& src, std::uint64_t range, WordWidth width) {
    const auto limit = width.admits_range(range) ? width.max_word() - (range - 1) : 0;
    return sample_with(src, range, width,
                       [range, limit](std::uint64_t word) { return word - word % range <= limit; });
}

std::string_view to_string(RngVariant variant) noexcept {
    return variant == RngVariant::chrome ? "chrome" : "keepass";
}

RngVariant parse_rng_variant(std::string_view text) {
    if (text == "chrome") {
        return RngVariant::chrome;
    }
    if (text == "keepass") {
        return RngVariant::keepass;
    }
    throw std::invalid_argument("unknown rng variant '" + std::string(text) + "'");
}

SamplerChoiceSource::SamplerChoiceSource(std::unique_ptr<ByteSource> src, WordWidth width, RngVariant variant)
    : src_(std::move(src)), width_(width), variant_(variant) {
    if (!src_) {
        throw std::invalid_argument("SamplerChoiceSource needs a byte source");
    }
}

std::uint64_t SamplerChoiceSource::choose(std::uint64_t n) {
    return variant_ == RngVariant::chrome ? sample_chrome(*src_, n, width_) : sample_keepass(*src_, n, width_);
}

std::unique_ptr<ChoiceSource> make_choice_source(std::unique_ptr<ByteSource> src, WordWidth width,
                                                 RngVariant variant) {
    return std::make_unique<SamplerChoiceSource>(std::move(src), width, variant);
}

ScriptedChoiceSource::ScriptedChoiceSource(std::vector<std::uint64_t> script) : script_(std::move(script)) {}

std::uint64_t ScriptedChoiceSource::choose(std::uint64_t n) {
    if (n == 0) {
        throw std::logic_error("choose(0) requested");
    }
    requested_.push_back(n);
    if (pos_ >= script_.size()) {
        throw std::logic_error("choice script exhausted at call " + std::to_string(pos_) + " (n = " +
                               std::to_string(n) + ")");
    }
    const auto value = script_[pos_++];
    if (value >= n) {
        throw std::logic_error("scripted choice " + std::to_string(value) + " not below n = " + std::to_string(n));
    }
    return value;
}

}  // namespace pwref
