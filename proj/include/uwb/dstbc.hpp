#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace uwb {

struct BitPair {
    int b1 = 0;
    int b2 = 0;
    friend bool operator==(const BitPair&, const BitPair&) = default;
};

/// One of the four signed-permutation codewords U(1)..U(4). The set is closed
/// under matrix product (a cyclic group of order 4), so a codeword is just an
/// index plus a shared table of 2x2 integer matrices.
class Codeword {
public:
    Codeword() = default;
    static Codeword from_index(int m);  // m in 1..4

    int index() const { return m_ + 1; }
    const Eigen::Matrix2i& imatrix() const;
    Eigen::Matrix2d matrix() const { return imatrix().cast<double>(); }

    friend bool operator==(const Codeword&, const Codeword&) = default;

private:
    explicit Codeword(int offset) : m_(offset) {}
    int m_ = 0;  // 0-based offset into the codebook
    friend Codeword group_mul(Codeword a, Codeword b);
    friend Codeword group_inverse(Codeword a);
};

/// +/-1-entried transmit symbol with D D^T = D^T D = 2I.
struct SymbolMatrix {
    Eigen::Matrix2i d;
    Eigen::Matrix2d matrix() const { return d.cast<double>(); }
    friend bool operator==(const SymbolMatrix&, const SymbolMatrix&) = default;
};

bool is_valid_symbol(const SymbolMatrix& s);

/// Gray mapping: 00 -> U(1), 01 -> U(2), 11 -> U(3), 10 -> U(4).
Codeword codeword_from_bits(BitPair b);
BitPair bits_from_codeword(Codeword u);

/// Looks a 2x2 integer matrix up in the codebook; throws if it is not one of
/// the four codewords.
Codeword codeword_from_matrix(const Eigen::Matrix2i& m);

/// Product inside the codebook, via a precomputed table that is checked
/// against literal matrix multiplication on first use.
Codeword group_mul(Codeword a, Codeword b);
Codeword group_inverse(Codeword a);

/// Hamming distance between the Gray bit labels of two codewords.
int bit_distance(Codeword a, Codeword b);

/// Reference symbol D0 = [[1,1],[1,-1]].
SymbolMatrix reference_symbol();

/// D_k = D_{k-1} U_k starting from D0; output length is info.size() + 1 with
/// output[0] = D0.
std::vector<SymbolMatrix> differential_encode(std::span<const Codeword> info);

}  // namespace uwb
