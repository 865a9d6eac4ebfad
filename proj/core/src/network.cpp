#include "injectcheck/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "injectcheck/errors.hpp"
#include "injectcheck/linalg.hpp"
#include "injectcheck/lp.hpp"

namespace injectcheck {

int ReluNetwork::in_dim() const {
    if (layers.empty()) throw DimensionError("network has no layers");
    return layers.front().in_dim();
}

int ReluNetwork::out_dim() const {
    if (final_linear) return static_cast<int>(final_linear->rows());
    if (layers.empty()) throw DimensionError("network has no layers");
    return layers.back().out_dim();
}

void validate_network(const ReluNetwork& net) {
    if (net.layers.empty()) throw DimensionError("network has no layers");
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        validate_layer(net.layers[i]);
        if (i > 0 && net.layers[i].in_dim() != net.layers[i - 1].out_dim())
            throw DimensionError("layer dimensions do not chain");
    }
    if (net.final_linear) {
        validate_matrix(*net.final_linear, "final linear map");
        if (net.final_linear->cols() != net.layers.back().out_dim())
            throw DimensionError("final linear map does not chain");
    }
}

Eigen::VectorXd forward(const ReluNetwork& net, const Eigen::VectorXd& z) {
    validate_network(net);
    if (z.size() != net.in_dim()) throw DimensionError("forward: wrong input dimension");
    Eigen::VectorXd h = z;
    for (const DenseLayer& layer : net.layers) h = layer.apply(h);
    if (net.final_linear) h = (*net.final_linear) * h;
    return h;
}

namespace {

struct PartialRegion {
    Eigen::MatrixXd a;
    Eigen::VectorXd c;
    std::vector<Eigen::VectorXi> patterns;
    std::vector<Eigen::VectorXd> normals;  // signed, joint-unit-normalized
    std::vector<double> offsets;
    Eigen::VectorXd witness;
};

enum class SideAnswer { Nonempty, Empty, Uncertain };

double hom_margin(const PartialRegion& r, const Eigen::VectorXd& g, double o,
                  const Eigen::VectorXd& x) {
    const double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
    double m = (g.dot(x) + o) / scale;
    for (std::size_t i = 0; i < r.normals.size(); ++i)
        m = std::min(m, (r.normals[i].dot(x) + r.offsets[i]) / scale);
    return m;
}

// Interior test for the region cut by sign*(g.x + o) > 0 in homogenized
// coordinates (x, s): complete regardless of how far from the origin the
// region lives, since any point rescales into the unit box.
struct SideResult {
    SideAnswer answer;
    Eigen::VectorXd witness;
};

SideResult region_side(const PartialRegion& r, const Eigen::VectorXd& g, double o,
                       double delta_strict) {
    const int n = static_cast<int>(g.size());
    const int k = static_cast<int>(r.normals.size());

    LinearProgram lp;
    lp.A.resize(k + 2, n + 2);  // columns: x, s, t
    lp.b = Eigen::VectorXd::Zero(k + 2);
    for (int i = 0; i < k; ++i) {
        lp.A.row(i).head(n) = r.normals[static_cast<std::size_t>(i)].transpose();
        lp.A(i, n) = r.offsets[static_cast<std::size_t>(i)];
        lp.A(i, n + 1) = -1.0;
    }
    lp.A.row(k).head(n) = g.transpose();
    lp.A(k, n) = o;
    lp.A(k, n + 1) = -1.0;
    lp.A.row(k + 1).setZero();
    lp.A(k + 1, n) = 1.0;  // s - t >= 0
    lp.A(k + 1, n + 1) = -1.0;
    lp.rel.assign(static_cast<std::size_t>(k + 2), LpRel::Ge);
    lp.objective = Eigen::VectorXd::Zero(n + 2);
    lp.objective[n + 1] = 1.0;
    lp.lo = Eigen::VectorXd::Constant(n + 2, -1.0);
    lp.hi = Eigen::VectorXd::Constant(n + 2, 1.0);
    lp.lo[n] = 0.0;
    lp.lo[n + 1] = 0.0;

    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) return {SideAnswer::Uncertain, {}};
    const double t = sol.x[n + 1];
    if (t >= delta_strict) {
        const double s = sol.x[n];
        if (s <= 0) return {SideAnswer::Uncertain, {}};
        Eigen::VectorXd x = sol.x.head(n) / s;
        if (hom_margin(r, g, o, x) >= delta_strict / 2) return {SideAnswer::Nonempty, x};
        return {SideAnswer::Uncertain, {}};
    }
    if (t <= tol::kEmptyMargin) return {SideAnswer::Empty, {}};
    return {SideAnswer::Uncertain, {}};
}


}  // namespace

RegionEnumeration enumerate_region_cells(const ReluNetwork& net, const RegionOptions& opts) {
    validate_network(net);
    const int n = net.in_dim();

    RegionEnumeration out;
    std::vector<PartialRegion> frontier;
    {
        PartialRegion root;
        root.a = Eigen::MatrixXd::Identity(n, n);
        root.c = Eigen::VectorXd::Zero(n);
        root.witness = Eigen::VectorXd::Zero(n);
        frontier.push_back(std::move(root));
    }

    for (const DenseLayer& layer : net.layers) {
        const bool splits = layer.activation != Activation::Identity;
        const double alpha = layer.activation == Activation::LeakyRelu ? layer.leaky_alpha : 0.0;
        const Eigen::VectorXd b = layer.bias_or_zero();
        const int mrows = layer.out_dim();

        std::vector<PartialRegion> done;
        done.reserve(frontier.size());
        for (PartialRegion& region : frontier) {
            // Pre-activation affine data on this region.
            Eigen::MatrixXd g = layer.weight * region.a;
            Eigen::VectorXd off = layer.weight * region.c + b;

            if (!splits) {
                region.a = std::move(g);
                region.c = std::move(off);
                region.patterns.emplace_back();  // identity layer: no pattern
                done.push_back(std::move(region));
                continue;
            }

            double scale = 0.0;
            for (int j = 0; j < mrows; ++j)
                scale = std::max(scale, std::hypot(g.row(j).norm(), off[j]));

            std::vector<PartialRegion> local;
            local.push_back(std::move(region));
            std::vector<std::vector<int>> local_signs(1);

            for (int j = 0; j < mrows; ++j) {
                const double joint = std::hypot(g.row(j).norm(), off[j]);
                const bool zero_neuron = (scale <= 0.0) || joint <= tol::kZeroRow * scale;
                const bool constant_sign = !zero_neuron && g.row(j).norm() <= 1e-11 * joint;

                std::vector<PartialRegion> next;
                std::vector<std::vector<int>> next_signs;
                next.reserve(local.size());
                next_signs.reserve(local.size());
                for (std::size_t q = 0; q < local.size(); ++q) {
                    PartialRegion& cell = local[q];
                    std::vector<int>& signs = local_signs[q];
                    if (zero_neuron) {
                        signs.push_back(+1);  // inclusive convention: 0 counts as active
                        next.push_back(std::move(cell));
                        next_signs.push_back(std::move(signs));
                        continue;
                    }
                    if (constant_sign) {
                        signs.push_back(off[j] >= 0 ? +1 : -1);
                        next.push_back(std::move(cell));
                        next_signs.push_back(std::move(signs));
                        continue;
                    }
                    const Eigen::VectorXd gu = g.row(j).transpose() / joint;
                    const double ou = off[j] / joint;

                    // Positive side first, then negative, each via witness
                    // shortcut or LP.
                    for (int sgn : {+1, -1}) {
                        const Eigen::VectorXd gs = sgn * gu;
                        const double os = sgn * ou;
                        bool have = false;
                        Eigen::VectorXd witness;
                        if (hom_margin(cell, gs, os, cell.witness) >= opts.delta_strict) {
                            have = true;
                            witness = cell.witness;
                        } else {
                            const SideResult r = region_side(cell, gs, os, opts.delta_strict);
                            if (r.answer == SideAnswer::Nonempty) {
                                have = true;
                                witness = r.witness;
                            } else if (r.answer == SideAnswer::Uncertain) {
                                out.uncertain = true;
                            }
                        }
                        if (!have) continue;
                        PartialRegion child;
                        child.a = cell.a;
                        child.c = cell.c;
                        child.patterns = cell.patterns;
                        child.normals = cell.normals;
                        child.offsets = cell.offsets;
                        child.normals.push_back(gs);
                        child.offsets.push_back(os);
                        child.witness = std::move(witness);
                        std::vector<int> child_signs = signs;
                        child_signs.push_back(sgn);
                        next.push_back(std::move(child));
                        next_signs.push_back(std::move(child_signs));
                    }
                }
                local = std::move(next);
                local_signs = std::move(next_signs);
                if (done.size() + local.size() > opts.budget)
                    throw BudgetExceededError("region budget exceeded", done.size() + local.size());
            }

            // Apply the activation gate row-wise and record the pattern.
            for (std::size_t q = 0; q < local.size(); ++q) {
                PartialRegion& cell = local[q];
                Eigen::MatrixXd a_next(mrows, n);
                Eigen::VectorXd c_next(mrows);
                Eigen::VectorXi pat(mrows);
                for (int j = 0; j < mrows; ++j) {
                    const int sgn = local_signs[q][static_cast<std::size_t>(j)];
                    pat[j] = sgn;
                    const double f = sgn > 0 ? 1.0 : alpha;
                    a_next.row(j) = f * g.row(j);
                    c_next[j] = f * off[j];
                }
                cell.a = std::move(a_next);
                cell.c = std::move(c_next);
                cell.patterns.push_back(std::move(pat));
                done.push_back(std::move(cell));
            }
        }
        frontier = std::move(done);
        if (frontier.size() > opts.budget)
            throw BudgetExceededError("region budget exceeded", frontier.size());
    }

    if (net.final_linear) {
        for (PartialRegion& r : frontier) {
            r.c = (*net.final_linear) * r.c;
            r.a = (*net.final_linear) * r.a;
        }
    }

    out.regions.reserve(frontier.size());
    for (PartialRegion& r : frontier) {
        AffineRegion ar;
        ar.activation_pattern = std::move(r.patterns);
        ar.a = std::move(r.a);
        ar.c = std::move(r.c);
        ar.witness = std::move(r.witness);
        ar.constraint_normals.resize(static_cast<Eigen::Index>(r.normals.size()), n);
        ar.constraint_offsets.resize(static_cast<Eigen::Index>(r.normals.size()));
        for (std::size_t i = 0; i < r.normals.size(); ++i) {
            ar.constraint_normals.row(static_cast<Eigen::Index>(i)) = r.normals[i].transpose();
            ar.constraint_offsets[static_cast<Eigen::Index>(i)] = r.offsets[i];
        }
        out.regions.push_back(std::move(ar));
    }
    return out;
}

std::vector<AffineRegion> enumerate_regions(const ReluNetwork& net, std::size_t budget) {
    RegionOptions opts;
    opts.budget = budget;
    return enumerate_region_cells(net, opts).regions;
}

namespace {

struct PairProbe {
    bool collision = false;
    bool uncertain = false;
    Eigen::VectorXd x, y;
};

// Least-squares polish of (x, y) onto {A_a x - A_b y = c_b - c_a}.
void polish_pair(const Eigen::MatrixXd& aa, const Eigen::MatrixXd& ab,
                 const Eigen::VectorXd& ca, const Eigen::VectorXd& cb,
                 Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd m(aa.rows(), 2 * n);
    m << aa, -ab;
    Eigen::VectorXd z(2 * n);
    z << x, y;
    const Eigen::VectorXd resid = m * z - (cb - ca);
    const Eigen::VectorXd corr =
        m.transpose() * (m * m.transpose()).completeOrthogonalDecomposition().pseudoInverse() * resid;
    z -= corr;
    x = z.head(n);
    y = z.tail(n);
}

// Separated-collision feasibility for one region pair, branching over the
// coordinate achieving the linf separation. Homogenized in s so distant
// collisions scale into the unit box.
PairProbe probe_pair(const ReluNetwork& net, const AffineRegion& ra, const AffineRegion& rb,
                     double delta_sep, double collide_tol) {
    PairProbe out;
    const int n = static_cast<int>(ra.a.cols());
    const int ka = static_cast<int>(ra.constraint_normals.rows());
    const int kb = static_cast<int>(rb.constraint_normals.rows());
    const int d = static_cast<int>(ra.a.rows());
    const int nv = 2 * n + 1;  // x, y, s

    LinearProgram lp;
    lp.A.resize(ka + kb + d + 1, nv);
    lp.b = Eigen::VectorXd::Zero(ka + kb + d + 1);
    lp.rel.clear();
    lp.A.setZero();
    for (int i = 0; i < ka; ++i) {
        lp.A.row(i).head(n) = ra.constraint_normals.row(i);
        lp.A(i, 2 * n) = ra.constraint_offsets[i];
        lp.rel.push_back(LpRel::Ge);
    }
    for (int i = 0; i < kb; ++i) {
        lp.A.row(ka + i).segment(n, n) = rb.constraint_normals.row(i);
        lp.A(ka + i, 2 * n) = rb.constraint_offsets[i];
        lp.rel.push_back(LpRel::Ge);
    }
    for (int i = 0; i < d; ++i) {
        lp.A.row(ka + kb + i).head(n) = ra.a.row(i);
        lp.A.row(ka + kb + i).segment(n, n) = -rb.a.row(i);
        lp.A(ka + kb + i, 2 * n) = ra.c[i] - rb.c[i];
        lp.rel.push_back(LpRel::Eq);
    }
    lp.rel.push_back(LpRel::Ge);  // separation branch row, filled per branch
    lp.objective = Eigen::VectorXd::Zero(nv);
    lp.objective[2 * n] = 1.0;
    lp.lo = Eigen::VectorXd::Constant(nv, -1.0);
    lp.hi = Eigen::VectorXd::Constant(nv, 1.0);
    lp.lo[2 * n] = 0.0;

    const int sep_row = ka + kb + d;
    for (int i = 0; i < n && !out.collision; ++i) {
        for (int sgn : {+1, -1}) {
            lp.A.row(sep_row).setZero();
            lp.A(sep_row, i) = sgn;
            lp.A(sep_row, n + i) = -sgn;
            lp.A(sep_row, 2 * n) = -delta_sep;

            const LpSolution sol = solve_lp(lp);
            if (sol.status != LpStatus::Optimal) {
                out.uncertain = true;
                continue;
            }
            const double s = sol.x[2 * n];
            if (s <= tol::kEmptyMargin) continue;  // provably no separated collision here
            if (s < 1e-7) {
                out.uncertain = true;
                continue;
            }
            Eigen::VectorXd x = sol.x.head(n) / s;
            Eigen::VectorXd y = sol.x.segment(n, n) / s;
            polish_pair(ra.a, rb.a, ra.c, rb.c, x, y);
            const Eigen::VectorXd fx = forward(net, x);
            const Eigen::VectorXd fy = forward(net, y);
            if ((fx - fy).norm() <= collide_tol &&
                (x - y).lpNorm<Eigen::Infinity>() >= delta_sep * 0.5) {
                out.collision = true;
                out.x = x;
                out.y = y;
                return out;
            }
            out.uncertain = true;  // LP says yes but evaluation disagrees
        }
    }
    return out;
}

}  // namespace

InjectivityCertificate certify_exact(const ReluNetwork& net, const ExactCertifyOptions& opts) {
    validate_network(net);
    const int n = net.in_dim();

    InjectivityCertificate cert;
    cert.method = "exact-regions";

    RegionOptions ropts;
    ropts.budget = opts.region_budget;
    RegionEnumeration en;
    try {
        en = enumerate_region_cells(net, ropts);
    } catch (const BudgetExceededError& e) {
        cert.verdict = Verdict::Inconclusive;
        cert.note = "region budget exceeded";
        cert.wedge_count = e.partial_count;
        return cert;
    }
    cert.wedge_count = en.regions.size();
    bool uncertain = en.uncertain;

    // Within one region injectivity is exactly full column rank of A.
    for (const AffineRegion& r : en.regions) {
        if (rank(r.a) >= n) continue;
        auto v = nullspace_vector(r.a);
        if (!v) {
            uncertain = true;
            continue;
        }
        // Step inside the region along the kernel direction.
        double eps = 1.0;
        for (int i = 0; i < r.constraint_normals.rows(); ++i) {
            const double margin = r.constraint_normals.row(i).dot(r.witness) + r.constraint_offsets[i];
            const double drift = std::abs(r.constraint_normals.row(i).dot(*v));
            if (drift > 1e-14) eps = std::min(eps, 0.5 * margin / drift);
        }
        if (eps <= 0) {
            uncertain = true;
            continue;
        }
        const Eigen::VectorXd x1 = r.witness;
        const Eigen::VectorXd x2 = r.witness + eps * (*v);
        if ((forward(net, x1) - forward(net, x2)).norm() <= opts.collide_tol &&
            (x1 - x2).norm() >= 10 * opts.collide_tol) {
            cert.verdict = Verdict::NonInjective;
            cert.collision = std::make_pair(x1, x2);
            cert.failing_witness = x1;
            cert.note = "rank-deficient region";
            return cert;
        }
        uncertain = true;
    }

    for (std::size_t a = 0; a < en.regions.size(); ++a) {
        for (std::size_t b = a + 1; b < en.regions.size(); ++b) {
            const PairProbe probe =
                probe_pair(net, en.regions[a], en.regions[b], opts.delta_sep, opts.collide_tol);
            if (probe.collision) {
                cert.verdict = Verdict::NonInjective;
                cert.collision = std::make_pair(probe.x, probe.y);
                cert.failing_witness = probe.x;
                return cert;
            }
            uncertain = uncertain || probe.uncertain;
        }
    }

    cert.verdict = uncertain ? Verdict::Inconclusive : Verdict::Injective;
    if (uncertain) cert.note = "some feasibility decisions could not be certified";
    return cert;
}

InjectivityCertificate certify_layerwise(const ReluNetwork& net, const CertifyOptions& opts) {
    validate_network(net);
    InjectivityCertificate cert;
    cert.method = "layerwise";
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const InjectivityCertificate layer_cert = check_dense(net.layers[i], opts);
        if (layer_cert.verdict != Verdict::Injective) {
            // Layerwise failure never proves end-to-end failure.
            cert.verdict = Verdict::Inconclusive;
            cert.note = "layer " + std::to_string(i + 1) + " not certified (" +
                        std::string(to_string(layer_cert.verdict)) + ")";
            return cert;
        }
    }
    if (net.final_linear &&
        rank(*net.final_linear, opts.rank_tol) < net.final_linear->cols()) {
        cert.verdict = Verdict::Inconclusive;
        cert.note = "final linear map is column-rank deficient";
        return cert;
    }
    cert.verdict = Verdict::Injective;
    return cert;
}

std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> collision_search(
    const ReluNetwork& net, int trials, Prng& prng, double tol_collide) {
    validate_network(net);
    if (trials < 1) throw DimensionError("collision_search: trials >= 1");
    const int n = net.in_dim();
    const double min_sep = 1e3 * tol_collide;

    struct Candidate {
        double f;
        Eigen::VectorXd z1, z2;
    };
    std::vector<Candidate> best;
    const std::size_t keep = 10;

    const auto gap = [&](const Eigen::VectorXd& z1, const Eigen::VectorXd& z2) {
        return (forward(net, z1) - forward(net, z2)).norm();
    };

    for (int t = 0; t < trials; ++t) {
        const double r1 = std::exp(prng.uniform(std::log(0.05), std::log(5.0)));
        Eigen::VectorXd z1 = r1 * prng.unit_sphere(n);
        Eigen::VectorXd z2;
        if (t % 2 == 0) {
            const double r2 = std::exp(prng.uniform(std::log(0.05), std::log(5.0)));
            z2 = r2 * prng.unit_sphere(n);
        } else {
            const double r = std::exp(prng.uniform(std::log(1e-2), std::log(1.0)));
            z2 = z1 + r * prng.unit_sphere(n);
        }
        if ((z1 - z2).norm() < min_sep) continue;
        const double f = gap(z1, z2);
        if (f <= tol_collide) return std::make_pair(z1, z2);
        if (best.size() < keep) {
            best.push_back({f, z1, z2});
        } else {
            auto worst = std::max_element(best.begin(), best.end(),
                                          [](const Candidate& a, const Candidate& b) { return a.f < b.f; });
            if (f < worst->f) *worst = {f, z1, z2};
        }
    }

    // Derivative-free coordinate descent on the squared gap, keeping the
    // pair separated.
    for (Candidate& cand : best) {
        double h = 0.25;
        double f = cand.f;
        for (int sweep = 0; sweep < 200 && h > 1e-12; ++sweep) {
            bool improved = false;
            for (int which = 0; which < 2; ++which) {
                Eigen::VectorXd& z = which == 0 ? cand.z1 : cand.z2;
                for (int i = 0; i < n; ++i) {
                    for (double step : {h, -h}) {
                        z[i] += step;
                        const double sep = (cand.z1 - cand.z2).norm();
                        const double fn = sep >= min_sep ? gap(cand.z1, cand.z2)
                                                         : std::numeric_limits<double>::infinity();
                        if (fn < f) {
                            f = fn;
                            improved = true;
                            break;
                        }
                        z[i] -= step;
                    }
                }
            }
            if (f <= tol_collide) return std::make_pair(cand.z1, cand.z2);
            if (!improved) h *= 0.5;
        }
        if (f <= tol_collide && (cand.z1 - cand.z2).norm() >= min_sep)
            return std::make_pair(cand.z1, cand.z2);
    }
    return std::nullopt;
}

ReluNetwork build_cascade(const CascadeSpec& spec, Prng& prng) {
    const auto& dims = spec.dims;
    if (dims.size() < 2) throw DimensionError("cascade needs at least one block");
    for (int d : dims)
        if (d < 1) throw DimensionError("cascade dims must be >= 1");
    const int n = dims[0];

    std::size_t expected_projections = 0;
    for (std::size_t p = 1; p < dims.size(); ++p) {
        if (p % 2 == 1) {
            if (dims[p] < 2 * dims[p - 1])
                throw DimensionError("cascade block output must be at least twice its input");
        } else {
            if (dims[p] < 2 * n + 1)
                throw DimensionError("cascade projection output must be >= 2n+1");
            ++expected_projections;
        }
    }
    if (spec.projections && spec.projections->size() != expected_projections)
        throw DimensionError("cascade: wrong number of supplied projections");

    const auto random_orthogonal = [&](int d) {
        Eigen::MatrixXd g = prng.gaussian_matrix(d, d);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ();
        const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int i = 0; i < d; ++i)
            if (r(i, i) < 0) q.col(i) = -q.col(i);
        return q;
    };

    ReluNetwork net;
    std::size_t proj_used = 0;
    for (std::size_t p = 1; p < dims.size(); ++p) {
        if (p % 2 == 1) {
            int cur = dims[p - 1];
            const int target = dims[p];
            while (target >= 4 * cur) {
                net.layers.push_back(DenseLayer::relu(
                    construct_minimal(random_orthogonal(cur), Eigen::VectorXd::Ones(cur))));
                cur *= 2;
            }
            const int extra_rows = target - 2 * cur;
            net.layers.push_back(DenseLayer::relu(
                construct_expanded(random_orthogonal(cur), Eigen::VectorXd::Ones(cur),
                                   extra_rows > 0 ? prng.gaussian_matrix(extra_rows, cur)
                                                  : Eigen::MatrixXd(0, cur))));
        } else {
            Eigen::MatrixXd bmat;
            if (spec.projections) {
                bmat = (*spec.projections)[proj_used];
                if (bmat.rows() != dims[p] || bmat.cols() != dims[p - 1])
                    throw DimensionError("cascade: supplied projection has wrong shape");
            } else {
                bmat = prng.gaussian_matrix(dims[p], dims[p - 1]);
            }
            ++proj_used;
            net.layers.push_back(DenseLayer::linear(std::move(bmat)));
        }
    }
    validate_network(net);
    return net;
}

}  // namespace injectcheck
