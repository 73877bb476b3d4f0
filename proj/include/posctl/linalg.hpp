#pragma once

/**
 * @file linalg.hpp
 * @brief Dense matrices, sign-structure predicates and the small set of
 *        eigen-oracles the rest of the library builds on.
 *
 * Storage is dense and row-major. Target sizes are a few hundred rows at
 * most; sparsity is exploited logically (per-row checks) rather than in
 * storage.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "error.hpp"

namespace posctl {

inline constexpr double kDefaultTol = 1e-9;

using Vector = std::vector<double>;

template<typename T>
class BasicMatrix {
public:
    using value_type = T;

    BasicMatrix() = default;

    BasicMatrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    BasicMatrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ == 0 ? 0 : init.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_)
                throw DimensionError("ragged matrix initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static BasicMatrix identity(std::size_t n) {
        BasicMatrix I(n, n);
        for (std::size_t i = 0; i < n; ++i)
            I(i, i) = T{1};
        return I;
    }

    static BasicMatrix diagonal(std::span<const T> d) {
        BasicMatrix D(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            D(i, i) = d[i];
        return D;
    }

    static BasicMatrix column(std::span<const T> v) {
        BasicMatrix M(v.size(), 1);
        std::copy(v.begin(), v.end(), M.data_.begin());
        return M;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    [[nodiscard]] std::span<const T> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    [[nodiscard]] const std::vector<T>& data() const noexcept { return data_; }

    [[nodiscard]] std::vector<T> col(std::size_t j) const {
        std::vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            c[i] = (*this)(i, j);
        return c;
    }

    [[nodiscard]] std::vector<T> diag() const {
        std::vector<T> d(std::min(rows_, cols_));
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = (*this)(i, i);
        return d;
    }

    [[nodiscard]] BasicMatrix transpose() const {
        BasicMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    [[nodiscard]] BasicMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_)
            throw DimensionError("block out of range");
        BasicMatrix b(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j)
                b(i, j) = (*this)(r0 + i, c0 + j);
        return b;
    }

    void set_block(std::size_t r0, std::size_t c0, const BasicMatrix& b) {
        if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_)
            throw DimensionError("block out of range");
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j)
                (*this)(r0 + i, c0 + j) = b(i, j);
    }

    BasicMatrix& operator+=(const BasicMatrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k)
            data_[k] += o.data_[k];
        return *this;
    }

    BasicMatrix& operator-=(const BasicMatrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k)
            data_[k] -= o.data_[k];
        return *this;
    }

    BasicMatrix& operator*=(T s) {
        for (auto& v : data_)
            v *= s;
        return *this;
    }

    friend BasicMatrix operator+(BasicMatrix a, const BasicMatrix& b) { return a += b; }
    friend BasicMatrix operator-(BasicMatrix a, const BasicMatrix& b) { return a -= b; }
    friend BasicMatrix operator*(BasicMatrix a, T s) { return a *= s; }
    friend BasicMatrix operator*(T s, BasicMatrix a) { return a *= s; }
    friend BasicMatrix operator-(BasicMatrix a) { return a *= T{-1}; }

    friend BasicMatrix operator*(const BasicMatrix& a, const BasicMatrix& b) {
        if (a.cols_ != b.rows_)
            throw DimensionError("matrix product: inner dimensions differ");
        BasicMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T aik = a(i, k);
                if (aik == T{})
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend std::vector<T> operator*(const BasicMatrix& a, std::span<const T> x) {
        if (a.cols_ != x.size())
            throw DimensionError("matrix-vector product: size mismatch");
        std::vector<T> y(a.rows_, T{});
        for (std::size_t i = 0; i < a.rows_; ++i) {
            T s{};
            for (std::size_t j = 0; j < a.cols_; ++j)
                s += a(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    friend std::vector<T> operator*(const BasicMatrix& a, const std::vector<T>& x) {
        return a * std::span<const T>(x);
    }

    friend bool operator==(const BasicMatrix&, const BasicMatrix&) = default;

private:
    void require_same_shape(const BasicMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DimensionError("matrix shapes differ");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using Matrix = BasicMatrix<double>;
using Complex = std::complex<double>;
using CMatrix = BasicMatrix<Complex>;

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

[[nodiscard]] inline Vector ones(std::size_t n) { return Vector(n, 1.0); }

[[nodiscard]] inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DimensionError("dot: size mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

[[nodiscard]] inline Vector operator+(Vector a, const Vector& b) {
    if (a.size() != b.size())
        throw DimensionError("vector sum: size mismatch");
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] += b[i];
    return a;
}

[[nodiscard]] inline Vector operator-(Vector a, const Vector& b) {
    if (a.size() != b.size())
        throw DimensionError("vector difference: size mismatch");
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] -= b[i];
    return a;
}

[[nodiscard]] inline Vector operator*(double s, Vector a) {
    for (auto& v : a)
        v *= s;
    return a;
}

[[nodiscard]] inline double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

template<typename T>
[[nodiscard]] double max_abs(const BasicMatrix<T>& A) {
    double m = 0.0;
    for (const auto& v : A.data())
        m = std::max(m, static_cast<double>(std::abs(v)));
    return m;
}

/// Max row sum of absolute values.
[[nodiscard]] inline double norm_inf(const Matrix& A) {
    double m = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i) {
        double s = 0.0;
        for (double v : A.row(i))
            s += std::abs(v);
        m = std::max(m, s);
    }
    return m;
}

[[nodiscard]] inline bool all_finite(const Matrix& A) {
    return std::all_of(A.data().begin(), A.data().end(), [](double v) { return std::isfinite(v); });
}

[[nodiscard]] inline Matrix horzcat(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw DimensionError("horzcat: row counts differ");
    Matrix c(a.rows(), a.cols() + b.cols());
    c.set_block(0, 0, a);
    c.set_block(0, a.cols(), b);
    return c;
}

[[nodiscard]] inline Matrix vertcat(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw DimensionError("vertcat: column counts differ");
    Matrix c(a.rows() + b.rows(), a.cols());
    c.set_block(0, 0, a);
    c.set_block(a.rows(), 0, b);
    return c;
}

// ---------------------------------------------------------------------------
// Sign-structure predicates
// ---------------------------------------------------------------------------

/// True iff every off-diagonal entry is >= -tol.
[[nodiscard]] inline bool is_metzler(const Matrix& A, double tol = kDefaultTol) {
    if (!A.is_square())
        throw DimensionError("is_metzler: matrix must be square");
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            if (i != j && A(i, j) < -tol)
                return false;
    return true;
}

[[nodiscard]] inline bool is_nonnegative(const Matrix& A, double tol = kDefaultTol) {
    return std::all_of(A.data().begin(), A.data().end(), [tol](double v) { return v >= -tol; });
}

[[nodiscard]] inline bool is_nonnegative(std::span<const double> v, double tol = kDefaultTol) {
    return std::all_of(v.begin(), v.end(), [tol](double x) { return x >= -tol; });
}

[[nodiscard]] inline bool is_symmetric(const Matrix& S, double tol = kDefaultTol) {
    if (!S.is_square())
        return false;
    const double scale = std::max(1.0, max_abs(S));
    for (std::size_t i = 0; i < S.rows(); ++i)
        for (std::size_t j = i + 1; j < S.cols(); ++j)
            if (std::abs(S(i, j) - S(j, i)) > tol * scale)
                return false;
    return true;
}

// ---------------------------------------------------------------------------
// LU factorization with partial pivoting
// ---------------------------------------------------------------------------

template<typename T>
class LuDecomposition {
public:
    explicit LuDecomposition(BasicMatrix<T> A) : lu_(std::move(A)), perm_(lu_.rows()) {
        if (!lu_.is_square())
            throw DimensionError("LU: matrix must be square");
        const std::size_t n = lu_.rows();
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        const double scale = std::max(max_abs(lu_), std::numeric_limits<double>::min());
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            double best = std::abs(lu_(k, k));
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(lu_(i, k)) > best) {
                    best = std::abs(lu_(i, k));
                    p = i;
                }
            if (best <= 1e-14 * scale) {
                singular_ = true;
                return;
            }
            if (p != k) {
                for (std::size_t j = 0; j < n; ++j)
                    std::swap(lu_(k, j), lu_(p, j));
                std::swap(perm_[k], perm_[p]);
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                const T f = lu_(i, k) / lu_(k, k);
                lu_(i, k) = f;
                if (f == T{})
                    continue;
                for (std::size_t j = k + 1; j < n; ++j)
                    lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    [[nodiscard]] bool singular() const noexcept { return singular_; }

    [[nodiscard]] std::vector<T> solve(std::span<const T> b) const {
        require_regular();
        const std::size_t n = lu_.rows();
        if (b.size() != n)
            throw DimensionError("LU solve: rhs size mismatch");
        std::vector<T> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            T s = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j)
                s -= lu_(i, j) * x[j];
            x[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            T s = x[i];
            for (std::size_t j = i + 1; j < n; ++j)
                s -= lu_(i, j) * x[j];
            x[i] = s / lu_(i, i);
        }
        return x;
    }

    [[nodiscard]] BasicMatrix<T> solve(const BasicMatrix<T>& B) const {
        if (B.rows() != lu_.rows())
            throw DimensionError("LU solve: rhs row count mismatch");
        BasicMatrix<T> X(B.rows(), B.cols());
        for (std::size_t j = 0; j < B.cols(); ++j) {
            const auto col = B.col(j);
            const auto x = solve(std::span<const T>(col));
            for (std::size_t i = 0; i < x.size(); ++i)
                X(i, j) = x[i];
        }
        return X;
    }

    [[nodiscard]] BasicMatrix<T> inverse() const { return solve(BasicMatrix<T>::identity(lu_.rows())); }

private:
    void require_regular() const {
        if (singular_)
            throw NumericalError("matrix is singular to working precision");
    }

    BasicMatrix<T> lu_;
    std::vector<std::size_t> perm_;
    bool singular_ = false;
};

template<typename T>
[[nodiscard]] BasicMatrix<T> inverse(const BasicMatrix<T>& A) {
    return LuDecomposition<T>(A).inverse();
}

/// Solves A X = B.
template<typename T>
[[nodiscard]] BasicMatrix<T> solve(const BasicMatrix<T>& A, const BasicMatrix<T>& B) {
    return LuDecomposition<T>(A).solve(B);
}

[[nodiscard]] inline Vector solve(const Matrix& A, const Vector& b) {
    return LuDecomposition<double>(A).solve(std::span<const double>(b));
}

// ---------------------------------------------------------------------------
// Perron root of nonnegative matrices
// ---------------------------------------------------------------------------

namespace detail {

/// Strongly connected components of the directed graph i -> j iff A(i,j) != 0, i != j.
inline std::vector<std::vector<std::size_t>> strong_components(const Matrix& A) {
    const std::size_t n = A.rows();
    constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> comps;
    std::size_t counter = 0;

    // Iterative Tarjan: frames hold (node, next neighbour to inspect).
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited)
            continue;
        std::vector<std::pair<std::size_t, std::size_t>> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, next] = frames.back();
            bool descended = false;
            while (next < n) {
                const std::size_t w = next++;
                if (w == v || A(v, w) == 0.0)
                    continue;
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.emplace_back(w, 0);
                    descended = true;
                    break;
                }
                if (on_stack[w])
                    low[v] = std::min(low[v], index[w]);
            }
            if (descended)
                continue;
            const std::size_t done = v;
            if (low[done] == index[done]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != done);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
            frames.pop_back();
            if (!frames.empty()) {
                const std::size_t parent = frames.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
        }
    }
    return comps;
}

/// Power iteration on an irreducible nonnegative matrix with positive diagonal
/// (hence primitive, with a simple dominant eigenvalue).
inline double primitive_perron_root(const Matrix& B) {
    constexpr int kMaxIterations = 100'000;
    constexpr double kRelChange = 1e-13;
    const std::size_t n = B.rows();
    Vector x(n, 1.0);
    double lambda_prev = std::numeric_limits<double>::quiet_NaN();
    int calm = 0;
    for (int it = 0; it < kMaxIterations; ++it) {
        Vector y = B * x;
        // Collatz-Wielandt bracket: min y_i/x_i <= rho <= max y_i/x_i for x > 0.
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] / x[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi)
            return 0.5 * (lo + hi);
        const double lambda = std::accumulate(y.begin(), y.end(), 0.0) / std::accumulate(x.begin(), x.end(), 0.0);
        if (std::abs(lambda - lambda_prev) <= kRelChange * std::abs(lambda)) {
            if (++calm >= 3)
                return lambda;
        } else {
            calm = 0;
        }
        lambda_prev = lambda;
        const double scale = *std::max_element(y.begin(), y.end());
        for (std::size_t i = 0; i < n; ++i)
            x[i] = y[i] / scale;
    }
    throw NumericalError("power iteration did not converge within the iteration cap");
}

/// Perron root of B + shift*I minus shift, taken as the maximum over
/// strongly connected blocks. Requires B + shift*I >= 0.
inline double shifted_perron_root(const Matrix& B, double shift) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& comp : strong_components(B)) {
        if (comp.size() == 1) {
            best = std::max(best, B(comp[0], comp[0]));
            continue;
        }
        Matrix sub(comp.size(), comp.size());
        for (std::size_t a = 0; a < comp.size(); ++a)
            for (std::size_t b = 0; b < comp.size(); ++b)
                sub(a, b) = B(comp[a], comp[b]) + (a == b ? shift : 0.0);
        best = std::max(best, primitive_perron_root(sub) - shift);
    }
    return best;
}

}  // namespace detail

/// Largest real part of the eigenvalues of a Metzler matrix.
///
/// Computed as the Perron root of A + sI minus s with s = 1 + max|a_ii|, per
/// strongly connected block of the sparsity graph, so that every power
/// iteration runs on a primitive matrix.
[[nodiscard]] inline double spectral_abscissa(const Matrix& A) {
    if (!A.is_square())
        throw DimensionError("spectral_abscissa: matrix must be square");
    if (A.rows() == 0)
        return -std::numeric_limits<double>::infinity();
    if (!is_metzler(A, 0.0))
        throw StructureError("spectral_abscissa: matrix is not Metzler");
    double shift = 0.0;
    for (double d : A.diag())
        shift = std::max(shift, std::abs(d));
    return detail::shifted_perron_root(A, 1.0 + shift);
}

/// Perron root of a nonnegative matrix.
[[nodiscard]] inline double spectral_radius(const Matrix& B) {
    if (!B.is_square())
        throw DimensionError("spectral_radius: matrix must be square");
    if (B.rows() == 0)
        return 0.0;
    if (!is_nonnegative(B, 0.0))
        throw StructureError("spectral_radius: matrix has negative entries");
    // For B >= 0 the Perron root is also the largest real part.
    return detail::shifted_perron_root(B, 1.0);
}

// ---------------------------------------------------------------------------
// Symmetric eigenproblem (cyclic Jacobi)
// ---------------------------------------------------------------------------

struct SymmetricEigen {
    Vector values;   ///< ascending
    Matrix vectors;  ///< column k belongs to values[k]
};

[[nodiscard]] inline SymmetricEigen symmetric_eigen(const Matrix& S, double tol = kDefaultTol) {
    if (!S.is_square())
        throw DimensionError("symmetric_eigen: matrix must be square");
    if (!is_symmetric(S, tol))
        throw StructureError("symmetric_eigen: matrix is not symmetric");
    const std::size_t n = S.rows();
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = 0.5 * (S(i, j) + S(j, i));
    Matrix v = Matrix::identity(n);

    double frob = 0.0;
    for (double x : a.data())
        frob += x * x;
    frob = std::sqrt(frob);
    const double target = std::max(1e-15 * frob, std::numeric_limits<double>::min());

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += 2 * a(p, q) * a(p, q);
        if (std::sqrt(off) <= target)
            break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0)
                    continue;
                const double theta = (a(q, q) - a(p, p)) / (2 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    SymmetricEigen out{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i)
            out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

[[nodiscard]] inline Vector symmetric_eigenvalues(const Matrix& S, double tol = kDefaultTol) {
    return symmetric_eigen(S, tol).values;
}

[[nodiscard]] inline double max_eigenvalue(const Matrix& S, double tol = kDefaultTol) {
    if (S.rows() == 0)
        return -std::numeric_limits<double>::infinity();
    return symmetric_eigen(S, tol).values.back();
}

/// Largest eigenvalue of a Hermitian matrix, via the real symmetric embedding
/// [[Re, -Im], [Im, Re]] whose spectrum is that of H with doubled multiplicity.
[[nodiscard]] inline double max_eigenvalue(const CMatrix& H, double tol = kDefaultTol) {
    const std::size_t n = H.rows();
    Matrix R(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            R(i, j) = R(n + i, n + j) = H(i, j).real();
            R(i, n + j) = -H(i, j).imag();
            R(n + i, j) = H(i, j).imag();
        }
    return max_eigenvalue(R, tol);
}

// ---------------------------------------------------------------------------
// Inverse sign checks
// ---------------------------------------------------------------------------

enum class TimeDomain { continuous, discrete };

/// Continuous form: -A^{-1} exists and is entrywise >= -1e-10.
/// Discrete form: (I - A)^{-1} exists and is entrywise >= -1e-10.
[[nodiscard]] inline bool nonneg_inverse_check(const Matrix& A, TimeDomain domain = TimeDomain::continuous) {
    if (!A.is_square())
        throw DimensionError("nonneg_inverse_check: matrix must be square");
    const Matrix target = domain == TimeDomain::continuous ? -A : Matrix::identity(A.rows()) - A;
    LuDecomposition<double> lu(target);
    if (lu.singular())
        throw NumericalError("nonneg_inverse_check: matrix is singular");
    const Matrix inv = lu.inverse();
    return is_nonnegative(inv, 1e-10);
}

}  // namespace posctl
