#include "injectcheck/conv.hpp"

#include <algorithm>
#include <cmath>

#include "injectcheck/errors.hpp"

namespace injectcheck {

namespace {

// Row-major linear index of the 1-based multi-index t in the given box.
long long linear_index(const MultiIndex& t, const MultiIndex& shape) {
    long long idx = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) idx = idx * shape[k] + (t[k] - 1);
    return idx;
}

// Advance a 1-based multi-index through [1..shape], last coordinate fastest.
bool next_index(MultiIndex& t, const MultiIndex& shape) {
    for (int k = static_cast<int>(shape.size()) - 1; k >= 0; --k) {
        if (t[static_cast<std::size_t>(k)] < shape[static_cast<std::size_t>(k)]) {
            ++t[static_cast<std::size_t>(k)];
            for (std::size_t j = static_cast<std::size_t>(k) + 1; j < shape.size(); ++j) t[j] = 1;
            return true;
        }
    }
    return false;
}

MultiIndex ones(std::size_t p) { return MultiIndex(p, 1); }

}  // namespace

long long multi_index_count(const MultiIndex& shape) {
    long long c = 1;
    for (int v : shape) {
        if (v < 1) throw ShapeError("multi-index components must be >= 1");
        c *= v;
    }
    return c;
}

bool multi_index_le(const MultiIndex& a, const MultiIndex& b) {
    if (a.size() != b.size()) throw ShapeError("multi-index dimensionality mismatch");
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] > b[k]) return false;
    return true;
}

bool multi_index_lt(const MultiIndex& a, const MultiIndex& b) {
    if (a.size() != b.size()) throw ShapeError("multi-index dimensionality mismatch");
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] >= b[k]) return false;
    return true;
}

void validate_kernel(const Kernel& k) {
    if (k.width.empty()) throw ShapeError("kernel width is empty");
    const long long count = multi_index_count(k.width);
    if (k.values.size() != count) throw ShapeError("kernel value count does not match width");
    if (!k.values.allFinite()) throw ShapeError("kernel has non-finite values");
    if (k.values.cwiseAbs().maxCoeff() <= 0.0)
        throw ShapeError("kernel must have at least one nonzero value");
}

void validate_conv_spec(const ConvSpec& spec) {
    if (spec.stride != 1) throw UnsupportedStrideError("only stride 1 is supported");
    if (spec.kernels.empty()) throw ShapeError("conv spec needs at least one kernel");
    if (multi_index_count(spec.signal_shape) < 1) throw ShapeError("bad signal shape");
    for (const Kernel& k : spec.kernels) {
        validate_kernel(k);
        if (k.width.size() != spec.signal_shape.size())
            throw ShapeError("kernel and signal dimensionality differ");
        if (!multi_index_le(k.width, spec.signal_shape))
            throw ShapeError("kernel wider than the signal");
    }
}

Eigen::MatrixXd conv_matrix(const ConvSpec& spec) {
    validate_conv_spec(spec);
    const MultiIndex& n = spec.signal_shape;
    const std::size_t p = n.size();
    const long long cells = multi_index_count(n);
    const long long rows = cells * static_cast<long long>(spec.kernels.size());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(rows, cells);

    long long row = 0;
    for (const Kernel& kernel : spec.kernels) {
        const MultiIndex& o = kernel.width;
        MultiIndex j = ones(p);
        do {
            MultiIndex i = ones(p);
            do {
                // Kernel is applied reversed: coefficient c_{O-I+1}.
                MultiIndex rev(p);
                MultiIndex pos(p);
                bool in_range = true;
                for (std::size_t k = 0; k < p; ++k) {
                    rev[k] = o[k] - i[k] + 1;
                    pos[k] = j[k] + i[k] - 1;
                    if (pos[k] > n[k]) {
                        if (spec.boundary == BoundaryMode::Periodic)
                            pos[k] = (pos[k] - 1) % n[k] + 1;
                        else
                            in_range = false;
                    }
                }
                if (in_range)
                    w(row, linear_index(pos, n)) += kernel.values[linear_index(rev, o)];
            } while (next_index(i, o));
            ++row;
        } while (next_index(j, n));
    }
    return w;
}

std::vector<Eigen::VectorXd> padded_kernels(const Kernel& c, const MultiIndex& p) {
    validate_kernel(c);
    if (c.width.size() != p.size()) throw ShapeError("padding dimensionality mismatch");
    std::vector<Eigen::VectorXd> out;
    if (!multi_index_le(c.width, p)) return out;  // no admissible offsets

    const std::size_t dims = p.size();
    MultiIndex span(dims);
    for (std::size_t k = 0; k < dims; ++k) span[k] = p[k] - c.width[k] + 1;  // offsets 0..P-O

    MultiIndex d = ones(dims);  // offset + 1, iterated lexicographically
    do {
        Eigen::VectorXd padded = Eigen::VectorXd::Zero(multi_index_count(p));
        MultiIndex i = ones(dims);
        do {
            MultiIndex t(dims);
            for (std::size_t k = 0; k < dims; ++k) t[k] = d[k] - 1 + i[k];
            padded[linear_index(t, p)] = c.values[linear_index(i, c.width)];
        } while (next_index(i, c.width));
        out.push_back(std::move(padded));
    } while (next_index(d, span));
    return out;
}

InjectivityCertificate check_conv(const std::vector<Kernel>& kernels, const MultiIndex& p,
                                  const CertifyOptions& opts) {
    if (kernels.empty()) throw ShapeError("check_conv: no kernels");
    std::vector<Eigen::VectorXd> family;
    for (const Kernel& k : kernels) {
        auto padded = padded_kernels(k, p);
        family.insert(family.end(), padded.begin(), padded.end());
    }
    if (family.empty()) throw ShapeError("check_conv: no kernel fits inside the padding box");

    Eigen::MatrixXd w(static_cast<Eigen::Index>(family.size()), family.front().size());
    for (std::size_t i = 0; i < family.size(); ++i) w.row(static_cast<Eigen::Index>(i)) = family[i].transpose();

    InjectivityCertificate cert = certify_dss_all(w, opts);
    cert.method = "padded-family/" + cert.method;
    if (cert.verdict == Verdict::Injective) {
        cert.note = "padded family certifies every signal size >= P";
        return cert;
    }
    // The condition is sufficient only: a failing family says nothing about
    // the layer, and its collision lives in R^P, not in signal space.
    cert.verdict = Verdict::Inconclusive;
    cert.collision.reset();
    cert.failing_witness.reset();
    cert.note = "padded family has no DSS at this P (test is sufficient only)";
    return cert;
}

std::optional<std::pair<MultiIndex, InjectivityCertificate>> search_padding(
    const std::vector<Kernel>& kernels, const MultiIndex& p_max, const CertifyOptions& opts) {
    if (kernels.empty()) throw ShapeError("search_padding: no kernels");
    const std::size_t dims = p_max.size();
    for (const Kernel& k : kernels)
        if (k.width.size() != dims) throw ShapeError("search_padding: dimensionality mismatch");
    if (multi_index_count(p_max) < 1) throw ShapeError("search_padding: bad P_max");

    std::vector<MultiIndex> candidates;
    MultiIndex p = ones(dims);
    do {
        bool fits = false;
        for (const Kernel& k : kernels)
            if (multi_index_le(k.width, p)) {
                fits = true;
                break;
            }
        if (fits) candidates.push_back(p);
    } while (next_index(p, p_max));

    std::sort(candidates.begin(), candidates.end(), [](const MultiIndex& a, const MultiIndex& b) {
        const long long va = multi_index_count(a), vb = multi_index_count(b);
        if (va != vb) return va < vb;
        return a < b;
    });

    for (const MultiIndex& cand : candidates) {
        InjectivityCertificate cert = check_conv(kernels, cand, opts);
        if (cert.verdict == Verdict::Injective) return std::make_pair(cand, std::move(cert));
    }
    return std::nullopt;
}

long long min_channels(const MultiIndex& o, const MultiIndex& p) {
    if (o.size() != p.size()) throw ShapeError("min_channels: dimensionality mismatch");
    if (!multi_index_lt(o, p)) throw DegenerateRatioError("min_channels: requires O < P componentwise");
    long long num = 2 * multi_index_count(p);
    long long den = 1;
    for (std::size_t k = 0; k < p.size(); ++k) den *= (p[k] - o[k]);
    return (num + den - 1) / den;
}

long long min_channels_count_bound(const MultiIndex& o, const MultiIndex& p) {
    if (o.size() != p.size()) throw ShapeError("min_channels_count_bound: dimensionality mismatch");
    if (!multi_index_le(o, p))
        throw DegenerateRatioError("min_channels_count_bound: requires O <= P componentwise");
    long long num = 2 * multi_index_count(p);
    long long den = 1;
    for (std::size_t k = 0; k < p.size(); ++k) den *= (p[k] - o[k] + 1);
    return (num + den - 1) / den;
}

std::vector<Kernel> construct_pm_filters(const std::vector<Kernel>& base,
                                         const std::vector<double>& scales) {
    if (base.size() != scales.size())
        throw DimensionError("construct_pm_filters: one scale per base kernel");
    for (double s : scales)
        if (!(s > 0.0)) throw NonPositiveScaleError("construct_pm_filters: scales must be > 0");
    std::vector<Kernel> out = base;
    for (std::size_t k = 0; k < base.size(); ++k) {
        validate_kernel(base[k]);
        Kernel neg = base[k];
        neg.values = -(scales[k] * scales[k]) * base[k].values;
        out.push_back(std::move(neg));
    }
    return out;
}

InjectivityCertificate cross_check_full(const ConvSpec& spec, const CertifyOptions& opts) {
    InjectivityCertificate cert = certify_dss_all(conv_matrix(spec), opts);
    cert.method = "full-conv-matrix/" + cert.method;
    return cert;
}

}  // namespace injectcheck
