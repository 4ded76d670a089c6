#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace vinecg {

/// Set of variable indices in {0, ..., 63}, stored as a bitmask.
/// Canonical ordering is ascending index; equality, subset and hashing
/// are O(1), which dominates graph traversal and candidate enumeration.
class VarSet {
  public:
    constexpr VarSet() = default;
    constexpr explicit VarSet(std::uint64_t bits) : bits_(bits) {}

    static VarSet of(std::initializer_list<int> vars) {
        VarSet s;
        for (int v : vars) s.insert(v);
        return s;
    }

    static VarSet from(const std::vector<int>& vars) {
        VarSet s;
        for (int v : vars) s.insert(v);
        return s;
    }

    /// All of {0, ..., d-1}.
    static constexpr VarSet full(int d) {
        return VarSet(d >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1);
    }

    constexpr void insert(int v) { bits_ |= std::uint64_t{1} << v; }
    constexpr void erase(int v) { bits_ &= ~(std::uint64_t{1} << v); }
    [[nodiscard]] constexpr bool contains(int v) const { return (bits_ >> v) & 1u; }
    [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
    [[nodiscard]] constexpr int size() const { return std::popcount(bits_); }
    [[nodiscard]] constexpr std::uint64_t bits() const { return bits_; }

    [[nodiscard]] constexpr bool is_subset_of(VarSet other) const {
        return (bits_ & ~other.bits_) == 0;
    }

    [[nodiscard]] constexpr VarSet with(int v) const {
        VarSet s = *this;
        s.insert(v);
        return s;
    }
    [[nodiscard]] constexpr VarSet without(int v) const {
        VarSet s = *this;
        s.erase(v);
        return s;
    }

    friend constexpr VarSet operator|(VarSet a, VarSet b) { return VarSet(a.bits_ | b.bits_); }
    friend constexpr VarSet operator&(VarSet a, VarSet b) { return VarSet(a.bits_ & b.bits_); }
    friend constexpr VarSet operator-(VarSet a, VarSet b) { return VarSet(a.bits_ & ~b.bits_); }
    friend constexpr bool operator==(VarSet a, VarSet b) { return a.bits_ == b.bits_; }
    friend constexpr auto operator<=>(VarSet a, VarSet b) { return a.bits_ <=> b.bits_; }

    /// Members in ascending order.
    [[nodiscard]] std::vector<int> to_vector() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(size()));
        std::uint64_t b = bits_;
        while (b != 0) {
            out.push_back(std::countr_zero(b));
            b &= b - 1;
        }
        return out;
    }

    /// Comma-separated ascending list, e.g. "2,4".  Empty set gives "".
    [[nodiscard]] std::string to_string() const {
        std::string out;
        bool first = true;
        for (int v : to_vector()) {
            if (!first) out += ',';
            out += std::to_string(v);
            first = false;
        }
        return out;
    }

  private:
    std::uint64_t bits_ = 0;
};

}  // namespace vinecg

template <>
struct std::hash<vinecg::VarSet> {
    std::size_t operator()(vinecg::VarSet s) const noexcept {
        return std::hash<std::uint64_t>{}(s.bits());
    }
};
