#include "qiforest/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qiforest {

namespace {

double sign_like(double magnitude, double sign_source) {
    return sign_source >= 0.0 ? std::fabs(magnitude) : -std::fabs(magnitude);
}

// Decomposes a (nr x nc, nr >= nc) in place: on return a holds the left
// singular vectors (nr x nc), w the unsorted singular values, v (nc x nc)
// the right singular vectors.
void golub_kahan_core(Matrix& a, Vector& w, Matrix& v) {
    const std::size_t nr = a.rows();
    const std::size_t nc = a.cols();
    w.assign(nc, 0.0);
    v = Matrix(nc, nc);
    Vector rv1(nc, 0.0);

    const double eps = std::numeric_limits<double>::epsilon();
    double g = 0.0, scale = 0.0, anorm = 0.0;
    std::size_t l = 0;

    // Householder reduction to bidiagonal form.
    for (std::size_t i = 0; i < nc; ++i) {
        l = i + 1;
        rv1[i] = scale * g;
        g = scale = 0.0;
        double s = 0.0;
        if (i < nr) {
            for (std::size_t k = i; k < nr; ++k) scale += std::fabs(a(k, i));
            if (scale != 0.0) {
                for (std::size_t k = i; k < nr; ++k) {
                    a(k, i) /= scale;
                    s += a(k, i) * a(k, i);
                }
                double f = a(i, i);
                g = -sign_like(std::sqrt(s), f);
                const double h = f * g - s;
                a(i, i) = f - g;
                for (std::size_t j = l; j < nc; ++j) {
                    double acc = 0.0;
                    for (std::size_t k = i; k < nr; ++k) acc += a(k, i) * a(k, j);
                    f = acc / h;
                    for (std::size_t k = i; k < nr; ++k) a(k, j) += f * a(k, i);
                }
                for (std::size_t k = i; k < nr; ++k) a(k, i) *= scale;
            }
        }
        w[i] = scale * g;
        g = scale = 0.0;
        s = 0.0;
        if (i < nr && i + 1 != nc) {
            for (std::size_t k = l; k < nc; ++k) scale += std::fabs(a(i, k));
            if (scale != 0.0) {
                for (std::size_t k = l; k < nc; ++k) {
                    a(i, k) /= scale;
                    s += a(i, k) * a(i, k);
                }
                double f = a(i, l);
                g = -sign_like(std::sqrt(s), f);
                const double h = f * g - s;
                a(i, l) = f - g;
                for (std::size_t k = l; k < nc; ++k) rv1[k] = a(i, k) / h;
                for (std::size_t j = l; j < nr; ++j) {
                    double acc = 0.0;
                    for (std::size_t k = l; k < nc; ++k) acc += a(j, k) * a(i, k);
                    for (std::size_t k = l; k < nc; ++k) a(j, k) += acc * rv1[k];
                }
                for (std::size_t k = l; k < nc; ++k) a(i, k) *= scale;
            }
        }
        anorm = std::max(anorm, std::fabs(w[i]) + std::fabs(rv1[i]));
    }

    // Accumulate right-hand transformations.
    for (std::size_t ii = nc; ii-- > 0;) {
        const std::size_t i = ii;
        if (i + 1 < nc) {
            if (g != 0.0) {
                // Double division avoids underflow in the outer product.
                for (std::size_t j = l; j < nc; ++j) v(j, i) = (a(i, j) / a(i, l)) / g;
                for (std::size_t j = l; j < nc; ++j) {
                    double acc = 0.0;
                    for (std::size_t k = l; k < nc; ++k) acc += a(i, k) * v(k, j);
                    for (std::size_t k = l; k < nc; ++k) v(k, j) += acc * v(k, i);
                }
            }
            for (std::size_t j = l; j < nc; ++j) v(i, j) = v(j, i) = 0.0;
        }
        v(i, i) = 1.0;
        g = rv1[i];
        l = i;
    }

    // Accumulate left-hand transformations.
    for (std::size_t ii = std::min(nr, nc); ii-- > 0;) {
        const std::size_t i = ii;
        l = i + 1;
        g = w[i];
        for (std::size_t j = l; j < nc; ++j) a(i, j) = 0.0;
        if (g != 0.0) {
            g = 1.0 / g;
            for (std::size_t j = l; j < nc; ++j) {
                double acc = 0.0;
                for (std::size_t k = l; k < nr; ++k) acc += a(k, i) * a(k, j);
                const double f = (acc / a(i, i)) * g;
                for (std::size_t k = i; k < nr; ++k) a(k, j) += f * a(k, i);
            }
            for (std::size_t j = i; j < nr; ++j) a(j, i) *= g;
        } else {
            for (std::size_t j = i; j < nr; ++j) a(j, i) = 0.0;
        }
        a(i, i) += 1.0;
    }

    // Diagonalize the bidiagonal form by implicit-shift QR sweeps.
    const int max_sweeps = 60;
    for (std::size_t kk = nc; kk-- > 0;) {
        const std::size_t k = kk;
        for (int iteration = 1;; ++iteration) {
            bool need_cancellation = true;
            std::size_t split = 0;
            std::size_t nm = 0;
            for (std::size_t lt = k + 1; lt-- > 0;) {
                split = lt;
                // rv1[0] is always zero, so the loop terminates here at the latest.
                if (std::fabs(rv1[split]) <= eps * anorm) {
                    need_cancellation = false;
                    break;
                }
                nm = split - 1;
                if (std::fabs(w[nm]) <= eps * anorm) break;
            }
            if (need_cancellation) {
                double c = 0.0, s = 1.0;
                for (std::size_t i = split; i <= k; ++i) {
                    double f = s * rv1[i];
                    rv1[i] = c * rv1[i];
                    if (std::fabs(f) <= eps * anorm) break;
                    g = w[i];
                    double h = std::hypot(f, g);
                    w[i] = h;
                    h = 1.0 / h;
                    c = g * h;
                    s = -f * h;
                    for (std::size_t j = 0; j < nr; ++j) {
                        const double y = a(j, nm);
                        const double z = a(j, i);
                        a(j, nm) = y * c + z * s;
                        a(j, i) = z * c - y * s;
                    }
                }
            }
            double z = w[k];
            if (split == k) {
                if (z < 0.0) {
                    w[k] = -z;
                    for (std::size_t j = 0; j < nc; ++j) v(j, k) = -v(j, k);
                }
                break;
            }
            if (iteration >= max_sweeps) {
                throw DegenerateData("svd: QR sweeps did not converge");
            }
            double x = w[split];
            const std::size_t km1 = k - 1;
            double y = w[km1];
            g = rv1[km1];
            double h = rv1[k];
            double f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
            g = std::hypot(f, 1.0);
            f = ((x - z) * (x + z) + h * ((y / (f + sign_like(g, f))) - h)) / x;
            double c = 1.0, s = 1.0;
            for (std::size_t j = split; j <= km1; ++j) {
                const std::size_t i = j + 1;
                g = rv1[i];
                y = w[i];
                h = s * g;
                g = c * g;
                z = std::hypot(f, h);
                rv1[j] = z;
                c = f / z;
                s = h / z;
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                for (std::size_t jj = 0; jj < nc; ++jj) {
                    x = v(jj, j);
                    z = v(jj, i);
                    v(jj, j) = x * c + z * s;
                    v(jj, i) = z * c - x * s;
                }
                z = std::hypot(f, h);
                w[j] = z;
                if (z != 0.0) {
                    z = 1.0 / z;
                    c = f * z;
                    s = h * z;
                }
                f = c * g + s * y;
                x = c * y - s * g;
                for (std::size_t jj = 0; jj < nr; ++jj) {
                    y = a(jj, j);
                    z = a(jj, i);
                    a(jj, j) = y * c + z * s;
                    a(jj, i) = z * c - y * s;
                }
            }
            rv1[split] = 0.0;
            rv1[k] = f;
            w[k] = x;
        }
    }
}

// Sort columns by descending singular value and flip signs so each right
// singular vector's largest-magnitude entry is positive.
void canonicalize(Matrix& u, Vector& w, Matrix& v) {
    const std::size_t nc = w.size();
    std::vector<std::size_t> order(nc);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });

    Matrix su(u.rows(), nc);
    Matrix sv(v.rows(), nc);
    Vector sw(nc);
    for (std::size_t j = 0; j < nc; ++j) {
        const std::size_t src = order[j];
        sw[j] = w[src];

        std::size_t pivot = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < v.rows(); ++i) {
            const double mag = std::fabs(v(i, src));
            if (mag > best) {
                best = mag;
                pivot = i;
            }
        }
        const double flip = v(pivot, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < u.rows(); ++i) su(i, j) = flip * u(i, src);
        for (std::size_t i = 0; i < v.rows(); ++i) sv(i, j) = flip * v(i, src);
    }
    u = std::move(su);
    v = std::move(sv);
    w = std::move(sw);
}

Matrix truncate_columns(const Matrix& m, std::size_t keep) {
    Matrix out(m.rows(), keep);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < keep; ++j) out(i, j) = m(i, j);
    }
    return out;
}

}  // namespace

SvdResult svd(const Matrix& x) {
    if (x.rows() == 0 || x.cols() == 0) throw InvalidInput("svd: empty matrix");
    require_finite(x, "svd");

    Matrix u;
    Vector w;
    Matrix v;
    const bool transposed = x.rows() < x.cols();
    u = transposed ? transpose(x) : x;
    golub_kahan_core(u, w, v);
    canonicalize(u, w, v);

    std::size_t rank = 0;
    const double cutoff = w.empty() ? 0.0 : kSvdRankTol * w.front();
    for (double value : w) {
        if (value > cutoff && value > 0.0) ++rank;
    }

    SvdResult result;
    result.s.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(rank));
    result.u = truncate_columns(u, rank);
    result.v = truncate_columns(v, rank);
    if (transposed) std::swap(result.u, result.v);
    return result;
}

Vector ols_solve(const Matrix& x, const Vector& y) {
    if (x.rows() != y.size()) throw InvalidInput("ols_solve: row count != target length");
    if (x.rows() == 0 || x.cols() == 0) throw InvalidInput("ols_solve: empty design matrix");
    require_finite(x, "ols_solve");
    require_finite(std::span(y), "ols_solve");

    const SvdResult dec = svd(x);
    const Vector uty = transposed_matvec(dec.u, y);
    Vector scaled(dec.rank());
    for (std::size_t i = 0; i < dec.rank(); ++i) scaled[i] = uty[i] / dec.s[i];

    Vector w(x.cols(), 0.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dec.rank(); ++i) acc += dec.v(j, i) * scaled[i];
        w[j] = acc;
    }
    return w;
}

}  // namespace qiforest
