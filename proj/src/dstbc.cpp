#include "uwb/dstbc.hpp"

#include <array>
#include <stdexcept>

namespace uwb {

namespace {

std::array<Eigen::Matrix2i, 4> make_codebook() {
    std::array<Eigen::Matrix2i, 4> book;
    book[0] << 1, 0, 0, 1;
    book[1] << 0, 1, -1, 0;
    book[2] << -1, 0, 0, -1;
    book[3] << 0, -1, 1, 0;
    return book;
}

const std::array<Eigen::Matrix2i, 4>& codebook() {
    static const auto book = make_codebook();
    return book;
}

// U(m) = J^(m-1) with J = U(2), so the group is Z4 on the offsets. The table
// is still validated against literal matrix products once at startup.
int mul_offset(int a, int b) { return (a + b) & 3; }

bool validate_group_table() {
    const auto& book = codebook();
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const Eigen::Matrix2i prod = book[a] * book[b];
            if (prod != book[mul_offset(a, b)])
                throw std::logic_error("dstbc: codeword product table is wrong");
        }
    }
    return true;
}

// Gray labels per codebook offset: U(1)=00, U(2)=01, U(3)=11, U(4)=10.
constexpr int kGrayB1[4] = {0, 0, 1, 1};
constexpr int kGrayB2[4] = {0, 1, 1, 0};

}  // namespace

Codeword Codeword::from_index(int m) {
    if (m < 1 || m > 4)
        throw std::invalid_argument("Codeword index must be in 1..4");
    return Codeword(m - 1);
}

const Eigen::Matrix2i& Codeword::imatrix() const { return codebook()[m_]; }

bool is_valid_symbol(const SymbolMatrix& s) {
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            if (s.d(r, c) != 1 && s.d(r, c) != -1) return false;
    return (s.d * s.d.transpose()) == (2 * Eigen::Matrix2i::Identity());
}

Codeword codeword_from_bits(BitPair b) {
    if ((b.b1 | b.b2) < 0 || b.b1 > 1 || b.b2 > 1)
        throw std::invalid_argument("BitPair entries must be 0 or 1");
    for (int off = 0; off < 4; ++off)
        if (kGrayB1[off] == b.b1 && kGrayB2[off] == b.b2)
            return Codeword::from_index(off + 1);
    throw std::logic_error("unreachable");
}

BitPair bits_from_codeword(Codeword u) {
    const int off = u.index() - 1;
    return BitPair{kGrayB1[off], kGrayB2[off]};
}

Codeword codeword_from_matrix(const Eigen::Matrix2i& m) {
    for (int off = 0; off < 4; ++off)
        if (codebook()[off] == m) return Codeword::from_index(off + 1);
    throw std::invalid_argument("matrix is not a codeword");
}

Codeword group_mul(Codeword a, Codeword b) {
    static const bool checked = validate_group_table();
    (void)checked;
    return Codeword(mul_offset(a.m_, b.m_));
}

Codeword group_inverse(Codeword a) { return Codeword((4 - a.m_) & 3); }

int bit_distance(Codeword a, Codeword b) {
    const BitPair pa = bits_from_codeword(a);
    const BitPair pb = bits_from_codeword(b);
    return (pa.b1 != pb.b1) + (pa.b2 != pb.b2);
}

SymbolMatrix reference_symbol() {
    SymbolMatrix d0;
    d0.d << 1, 1, 1, -1;
    return d0;
}

std::vector<SymbolMatrix> differential_encode(std::span<const Codeword> info) {
    std::vector<SymbolMatrix> out;
    out.reserve(info.size() + 1);
    out.push_back(reference_symbol());
    for (const Codeword& u : info) {
        SymbolMatrix next;
        next.d = out.back().d * u.imatrix();
        out.push_back(next);
    }
    return out;
}

}  // namespace uwb
