#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "ztraj/core/gaussian.hpp"

namespace ztraj {

/// Dense row-major matrix over Q(i). Used for every exact kernel/rank
/// computation in the library.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = GaussianRational(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    GaussianRational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const GaussianRational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<GaussianRational> row(std::size_t i) const
    {
        return {data_.begin() + static_cast<long>(i * cols_), data_.begin() + static_cast<long>((i + 1) * cols_)};
    }

    void append_row(const std::vector<GaussianRational>& r)
    {
        if (rows_ == 0 && cols_ == 0)
            cols_ = r.size();
        if (r.size() != cols_)
            throw DimensionError("row length mismatch");
        data_.insert(data_.end(), r.begin(), r.end());
        ++rows_;
    }

    Matrix transpose() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix submatrix(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const
    {
        Matrix m(rs.size(), cs.size());
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (std::size_t j = 0; j < cs.size(); ++j)
                m(i, j) = (*this)(rs[i], cs[j]);
        return m;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_)
            throw DimensionError("matrix product shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const auto& aik = a(i, k);
                if (aik.is_zero())
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    if (!b(k, j).is_zero())
                        c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    void swap_rows(std::size_t a, std::size_t b)
    {
        if (a == b)
            return;
        for (std::size_t j = 0; j < cols_; ++j)
            std::swap((*this)(a, j), (*this)(b, j));
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<GaussianRational> data_;
};

struct RrefResult {
    Matrix reduced;                 // reduced row echelon form, zero rows removed
    std::vector<std::size_t> pivots; // pivot column of each nonzero row
};

/// Gauss-Jordan elimination. Columns are scanned left to right, so callers
/// control pivot preference through column order.
inline RrefResult rref(Matrix m)
{
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t piv = r;
        while (piv < m.rows() && m(piv, c).is_zero())
            ++piv;
        if (piv == m.rows())
            continue;
        m.swap_rows(piv, r);
        GaussianRational inv = m(r, c).inverse();
        for (std::size_t j = c; j < m.cols(); ++j)
            if (!m(r, j).is_zero())
                m(r, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || m(i, c).is_zero())
                continue;
            GaussianRational f = m(i, c);
            for (std::size_t j = c; j < m.cols(); ++j)
                if (!m(r, j).is_zero())
                    m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    Matrix out(r, m.cols());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(i, j) = m(i, j);
    return {std::move(out), std::move(pivots)};
}

inline std::size_t rank(const Matrix& m) { return rref(m).pivots.size(); }

/// Basis of the right kernel {v : m v = 0}, one vector per free column, each
/// normalized to 1 in its free coordinate.
inline std::vector<std::vector<GaussianRational>> kernel(const Matrix& m)
{
    RrefResult r = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : r.pivots)
        is_pivot[p] = true;
    std::vector<std::vector<GaussianRational>> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f])
            continue;
        std::vector<GaussianRational> v(m.cols());
        v[f] = GaussianRational(1);
        for (std::size_t i = 0; i < r.pivots.size(); ++i)
            v[r.pivots[i]] = -r.reduced(i, f);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Exact determinant by Gaussian elimination.
inline GaussianRational determinant(Matrix m)
{
    if (m.rows() != m.cols())
        throw DimensionError("determinant of non-square matrix");
    std::size_t n = m.rows();
    GaussianRational det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m(piv, c).is_zero())
            ++piv;
        if (piv == n)
            return GaussianRational();
        if (piv != c) {
            m.swap_rows(piv, c);
            det = -det;
        }
        det *= m(c, c);
        GaussianRational inv = m(c, c).inverse();
        for (std::size_t i = c + 1; i < n; ++i) {
            if (m(i, c).is_zero())
                continue;
            GaussianRational f = m(i, c) * inv;
            for (std::size_t j = c; j < n; ++j)
                if (!m(c, j).is_zero())
                    m(i, j) -= f * m(c, j);
        }
    }
    return det;
}

/// Solves m x = b; returns nullopt if inconsistent. Free variables are set to 0.
inline std::optional<std::vector<GaussianRational>> solve(const Matrix& m, const std::vector<GaussianRational>& b)
{
    if (b.size() != m.rows())
        throw DimensionError("right-hand side length mismatch");
    Matrix aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j)
            aug(i, j) = m(i, j);
        aug(i, m.cols()) = b[i];
    }
    RrefResult r = rref(std::move(aug));
    std::vector<GaussianRational> x(m.cols());
    for (std::size_t i = 0; i < r.pivots.size(); ++i) {
        if (r.pivots[i] == m.cols())
            return std::nullopt;
        x[r.pivots[i]] = r.reduced(i, m.cols());
    }
    return x;
}

/// Incrementally maintained row space in reduced echelon form. Rows are
/// added one at a time; each insertion reports whether the rank grew.
class EchelonBasis {
public:
    explicit EchelonBasis(std::size_t cols) : cols_(cols) {}

    std::size_t rank() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }
    const std::vector<std::vector<GaussianRational>>& rows() const { return rows_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }

    /// Reduces v against the current rows (in place).
    void reduce(std::vector<GaussianRational>& v) const
    {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const auto& c = v[pivots_[i]];
            if (c.is_zero())
                continue;
            GaussianRational f = c;
            for (std::size_t j = 0; j < cols_; ++j)
                if (!rows_[i][j].is_zero())
                    v[j] -= f * rows_[i][j];
        }
    }

    bool insert(std::vector<GaussianRational> v)
    {
        if (v.size() != cols_)
            throw DimensionError("row length mismatch");
        reduce(v);
        std::size_t p = 0;
        while (p < cols_ && v[p].is_zero())
            ++p;
        if (p == cols_)
            return false;
        GaussianRational inv = v[p].inverse();
        for (auto& x : v)
            if (!x.is_zero())
                x *= inv;
        // keep the basis fully reduced
        for (auto& r : rows_) {
            if (r[p].is_zero())
                continue;
            GaussianRational f = r[p];
            for (std::size_t j = 0; j < cols_; ++j)
                if (!v[j].is_zero())
                    r[j] -= f * v[j];
        }
        auto pos = std::lower_bound(pivots_.begin(), pivots_.end(), p) - pivots_.begin();
        pivots_.insert(pivots_.begin() + pos, p);
        rows_.insert(rows_.begin() + pos, std::move(v));
        return true;
    }

private:
    std::size_t cols_;
    std::vector<std::vector<GaussianRational>> rows_;
    std::vector<std::size_t> pivots_;
};

} // namespace ztraj
