#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace pwref {

// ---------------------------------------------------------------------------
// Byte sources
// ---------------------------------------------------------------------------

/// Supplier of random bytes. Implementations always fill the whole buffer.
/// Instances are not thread-safe; give each thread its own.
class ByteSource {
public:
    virtual ~ByteSource() = default;

    virtual void fill(std::span<std::uint8_t> out) = 0;

    std::vector<std::uint8_t> next_bytes(std::size_t count);
};

/// Operating-system CSPRNG.
class SystemByteSource final : public ByteSource {
public:
    SystemByteSource();
    void fill(std::span<std::uint8_t> out) override;
};

/// Deterministic ChaCha20 keystream. The 256-bit key is `seed` as 8
/// little-endian bytes followed by zeros; the 96-bit nonce is `stream` as 8
/// little-endian bytes followed by zeros. Distinct (seed, stream) pairs give
/// independent streams, so parallel workers can each take their own.
class SeededByteSource final : public ByteSource {
public:
    explicit SeededByteSource(std::uint64_t seed, std::uint64_t stream = 0);
    void fill(std::span<std::uint8_t> out) override;

private:
    void refill();

    std::array<std::uint8_t, 32> key_{};
    std::array<std::uint8_t, 12> nonce_{};
    std::uint32_t block_counter_ = 0;
    std::array<std::uint8_t, 64> block_{};
    std::size_t block_pos_ = 64;
};

class ScriptExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Replays a fixed byte script; throws ScriptExhausted when it runs out.
class ScriptedByteSource final : public ByteSource {
public:
    explicit ScriptedByteSource(std::vector<std::uint8_t> script);
    void fill(std::span<std::uint8_t> out) override;

    std::size_t remaining() const noexcept { return script_.size() - pos_; }

private:
    std::vector<std::uint8_t> script_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Words and rejection samplers
// ---------------------------------------------------------------------------

/// Bit width of the sampler's machine word. 64 in production; smaller widths
/// make the samplers exhaustively checkable.
class WordWidth {
public:
    constexpr WordWidth() = default;
    explicit WordWidth(unsigned bits);

    constexpr unsigned bits() const noexcept { return bits_; }
    constexpr std::size_t byte_count() const noexcept { return (bits_ + 7) / 8; }
    /// 2^bits - 1, the largest word.
    constexpr std::uint64_t max_word() const noexcept {
        return bits_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits_) - 1;
    }
    /// True when `range` <= 2^bits.
    constexpr bool admits_range(std::uint64_t range) const noexcept {
        return range >= 1 && (bits_ == 64 || range - 1 <= max_word());
    }

    friend constexpr bool operator==(WordWidth, WordWidth) = default;

private:
    unsigned bits_ = 64;
};

/// Encodes words as the little-endian byte script word_from_bytes reads back.
std::vector<std::uint8_t> encode_words(std::span<const std::uint64_t> words, WordWidth width);

/// Reads byte_count() bytes, little-endian, masked to the word width.
std::uint64_t word_from_bytes(ByteSource& src, WordWidth width);

/// Chrome's acceptance bound: (max_word / range) * range - 1, evaluated in
/// width-bit unsigned arithmetic. Note this rejects the top word even when
/// range divides 2^bits (range = 2^bits wraps to max_word and rejects nothing).
std::uint64_t max_accepted(std::uint64_t range, WordWidth width);

bool chrome_accepts(std::uint64_t word, std::uint64_t range, WordWidth width);
bool keepass_accepts(std::uint64_t word, std::uint64_t range, WordWidth width);

inline constexpr std::uint64_t kRejectionLimit = std::uint64_t{1} << 20;

class RejectionLimitExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t sample_chrome(ByteSource& src, std::uint64_t range, WordWidth width = {});
std::uint64_t sample_keepass(ByteSource& src, std::uint64_t range, WordWidth width = {});

// ---------------------------------------------------------------------------
// Choice sources
// ---------------------------------------------------------------------------

/// The only randomness the generator and the ideal sampler consume.
class ChoiceSource {
public:
    virtual ~ChoiceSource() = default;

    /// Returns a value in [0, n). Requires n >= 1.
    virtual std::uint64_t choose(std::uint64_t n) = 0;
};

enum class RngVariant { chrome, keepass };

std::string_view to_string(RngVariant variant) noexcept;
RngVariant parse_rng_variant(std::string_view text);

/// ChoiceSource over a ByteSource through one of the rejection samplers.
class SamplerChoiceSource final : public ChoiceSource {
public:
    SamplerChoiceSource(std::unique_ptr<ByteSource> src, WordWidth width = {},
                        RngVariant variant = RngVariant::chrome);

    std::uint64_t choose(std::uint64_t n) override;

private:
    std::unique_ptr<ByteSource> src_;
    WordWidth width_;
    RngVariant variant_;
};

std::unique_ptr<ChoiceSource> make_choice_source(std::unique_ptr<ByteSource> src, WordWidth width = {},
                                                 RngVariant variant = RngVariant::chrome);

/// Returns a fixed list of choices in order. Each scripted value must be
/// below the requested n; violations and exhaustion throw std::logic_error.
/// Records every requested n for randomness-accounting checks.
class ScriptedChoiceSource final : public ChoiceSource {
public:
    explicit ScriptedChoiceSource(std::vector<std::uint64_t> script);

    std::uint64_t choose(std::uint64_t n) override;

    const std::vector<std::uint64_t>& requested_ranges() const noexcept { return requested_; }
    std::size_t consumed() const noexcept { return pos_; }

private:
    std::vector<std::uint64_t> script_;
    std::vector<std::uint64_t> requested_;
    std::size_t pos_ = 0;
};

}  // namespace pwref
