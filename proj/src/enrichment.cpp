#include "ufem/enrichment.hpp"

#include "ufem/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ufem {

std::string scheme_name(SchemeKind kind)
{
    switch (kind) {
    case SchemeKind::FEM: return "fem";
    case SchemeKind::GFEM: return "gfem";
    case SchemeKind::CGFEM: return "cgfem";
    case SchemeKind::SGFEM: return "sgfem";
    case SchemeKind::HoSGFEM: return "hosgfem";
    }
    return "unknown";
}

SchemeKind parse_scheme(const std::string& name)
{
    for (auto k : {SchemeKind::FEM, SchemeKind::GFEM, SchemeKind::CGFEM, SchemeKind::SGFEM,
                   SchemeKind::HoSGFEM}) {
        if (scheme_name(k) == name) return k;
    }
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

bool Scheme::uses_gram_schmidt(int p) const
{
    if (kind != SchemeKind::HoSGFEM) return false;
    if (orthogonalize == Orthogonalize::On) return true;
    if (orthogonalize == Orthogonalize::Off) return false;
    return p >= 2;
}

// ---------------------------------------------------------------- PU functions

std::vector<double> PUFunction::coefficients_on(const QuadMesh& mesh, int e) const
{
    const int p = mesh.degree();
    const int m = p + 1;
    std::vector<double> out(static_cast<std::size_t>(m * m), 0.0);
    const int di = (mesh.cell_i(e) - mesh.cell_i(cell)) * p;
    const int dj = (mesh.cell_j(e) - mesh.cell_j(cell)) * p;
    for (int b = 0; b <= p; ++b) {
        for (int a = 0; a <= p; ++a) {
            const int ka = a + di, kb = b + dj;
            if (ka < 0 || ka > p || kb < 0 || kb > p) continue;
            out[static_cast<std::size_t>(a + m * b)] = coeffs[static_cast<std::size_t>(ka + m * kb)];
        }
    }
    return out;
}

std::vector<PUFunction> build_pu(const QuadMesh& mesh, const CellClassification& cls, int p)
{
    if (p != mesh.degree()) throw std::invalid_argument("build_pu: p differs from the mesh degree");
    const int n = mesh.n();
    const int m = p + 1;
    auto cut = [&](int i, int j) {
        return i >= 0 && i < n && j >= 0 && j < n &&
               cls.is_cut[static_cast<std::size_t>(mesh.cell_id(i, j))];
    };

    std::vector<PUFunction> out;
    out.reserve(cls.cut_cells.size());
    for (int k : cls.cut_cells) {
        const int ci = mesh.cell_i(k), cj = mesh.cell_j(k);
        PUFunction f;
        f.cell = k;
        f.support.push_back(k);
        for (int e : mesh.vertex_neighbors(k)) f.support.push_back(e);
        std::sort(f.support.begin(), f.support.end());
        f.coeffs.assign(static_cast<std::size_t>(m * m), 1.0);
        for (int b = 0; b <= p; ++b) {
            for (int a = 0; a <= p; ++a) {
                const bool ea = (a == 0 || a == p), eb = (b == 0 || b == p);
                double c = 1.0;
                if (ea && eb) {
                    const int v = mesh.vertex_id(ci + a / p, cj + b / p);
                    int nv = 0;
                    for (int e : mesh.vertex_cells(v)) nv += cls.is_cut[static_cast<std::size_t>(e)];
                    c = 1.0 / nv;
                } else if (ea) {
                    c = cut(a == 0 ? ci - 1 : ci + 1, cj) ? 0.5 : 1.0;
                } else if (eb) {
                    c = cut(ci, b == 0 ? cj - 1 : cj + 1) ? 0.5 : 1.0;
                }
                f.coeffs[static_cast<std::size_t>(a + m * b)] = c;
            }
        }
        out.push_back(std::move(f));
    }
    return out;
}

double pu_defect(const QuadMesh& mesh, const CellClassification& cls, const InterfaceGeometry& geom,
                 const std::vector<PUFunction>& pus)
{
    const int p = mesh.degree();
    const ReferenceBasis bern(BasisKind::Bernstein, p);
    std::vector<std::vector<const PUFunction*>> on_cell(static_cast<std::size_t>(mesh.num_cells()));
    for (const auto& f : pus) {
        for (int e : f.support) on_cell[static_cast<std::size_t>(e)].push_back(&f);
    }
    std::vector<double> vals;
    double worst = 0.0;
    for (int c : cls.cut_cells) {
        std::vector<std::vector<double>> coeffs;
        for (const auto* f : on_cell[static_cast<std::size_t>(c)]) coeffs.push_back(f->coefficients_on(mesh, c));
        for (const auto& rule : cell_rule(mesh, cls, geom, c, p)) {
            for (const Point2& x : rule.points) {
                const Point2 st = mesh.to_reference(c, x);
                bern.eval_all(st.x, st.y, vals);
                double sum = 0.0;
                for (const auto& a : coeffs) {
                    for (std::size_t k = 0; k < vals.size(); ++k) sum += a[k] * vals[k];
                }
                worst = std::max(worst, std::abs(sum - 1.0));
            }
        }
    }
    return worst;
}

// ---------------------------------------------------------------- ramp

RampFunction::RampFunction(const QuadMesh& mesh, const CellClassification& cls)
    : mesh_(mesh), enriched_(cls.vertex_is_cut)
{
}

double RampFunction::on_cell(int c, double s, double t, Vec2* grad_ref) const
{
    const auto verts = mesh_.cell_vertices(c);
    double r = 0.0;
    Vec2 g{0.0, 0.0};
    for (int k = 0; k < 4; ++k) {
        if (!enriched_[static_cast<std::size_t>(verts[static_cast<std::size_t>(k)])]) continue;
        const int a = k % 2, b = k / 2;
        const double hs = a ? s : 1.0 - s, ht = b ? t : 1.0 - t;
        r += hs * ht;
        g = g + Vec2{(a ? 1.0 : -1.0) * ht, hs * (b ? 1.0 : -1.0)};
    }
    if (grad_ref) *grad_ref = g;
    return r;
}

double RampFunction::eval(Point2 x, Vec2* grad) const
{
    const int c = locate_cell(mesh_, x);
    const Point2 st = mesh_.to_reference(c, x);
    Vec2 g;
    const double r = on_cell(c, st.x, st.y, &g);
    if (grad) *grad = g * static_cast<double>(mesh_.n());
    return r;
}

RampFunction build_ramp(const QuadMesh& mesh, const CellClassification& cls)
{
    return RampFunction(mesh, cls);
}

// ---------------------------------------------------------------- space

struct EnrichmentSpace::Scratch {
    double s = 0.0, t = 0.0;
    std::vector<double> lag;
    std::vector<Vec2> lag_g;
    std::vector<double> bern;
    std::vector<Vec2> bern_g;
};

namespace {

std::vector<std::pair<int, int>> multi_indices(int max_level)
{
    std::vector<std::pair<int, int>> out;
    for (int l = 0; l <= max_level; ++l) {
        for (int i = l; i >= 0; --i) out.emplace_back(i, l - i);
    }
    return out;
}

double ipow(double x, int e)
{
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= x;
    return r;
}

}  // namespace

EnrichmentSpace::EnrichmentSpace(const QuadMesh& mesh, const CellClassification& cls,
                                 const InterfaceGeometry& geom, const Scheme& scheme)
    : mesh_(mesh), geom_(geom), cls_(cls), scheme_(scheme), p_(mesh.degree())
{
    if (!(scheme.lpca_xi >= 0.0 && scheme.lpca_xi < 1.0) && scheme.kind == SchemeKind::SGFEM) {
        throw std::invalid_argument("LPCA threshold must lie in [0, 1)");
    }
    ramp_corner_ = cls.vertex_is_cut;
    build_blocks(cls);
    precompute_local(cls);
    if (scheme_.uses_gram_schmidt(p_)) {
        for (int b = 0; b < static_cast<int>(blocks_.size()); ++b) orthogonalize_block(b);
    }
    renumber();
}

void EnrichmentSpace::build_blocks(const CellClassification& cls)
{
    EnrichedBasisFn proto;
    proto.scheme = scheme_.kind;
    std::vector<int> carriers;
    int max_level = p_ - 1;

    switch (scheme_.kind) {
    case SchemeKind::FEM: return;
    case SchemeKind::GFEM:
        proto.pu = PUKind::Hat;
        carriers = cls.cut_vertices;
        break;
    case SchemeKind::CGFEM:
        proto.pu = PUKind::Hat;
        proto.ramp = true;
        carriers = cls.near_vertices;
        max_level = p_;
        break;
    case SchemeKind::SGFEM:
        proto.pu = PUKind::Hermite;
        proto.distance = DistanceFlavor::OneSided;
        proto.subtract_interpolant = true;
        carriers = cls.cut_vertices;
        break;
    case SchemeKind::HoSGFEM:
        proto.pu = PUKind::Bernstein;
        proto.distance = scheme_.distance;
        proto.subtract_interpolant = true;
        carriers = cls.cut_cells;
        pus_ = build_pu(mesh_, cls, p_);
        break;
    }
    std::sort(carriers.begin(), carriers.end());
    const auto mi = multi_indices(max_level);

    for (std::size_t ci = 0; ci < carriers.size(); ++ci) {
        const int carrier = carriers[ci];
        EnrichmentBlock blk;
        blk.carrier = carrier;
        if (scheme_.kind == SchemeKind::HoSGFEM) {
            const auto it = std::find_if(pus_.begin(), pus_.end(),
                                         [carrier](const PUFunction& f) { return f.cell == carrier; });
            blk.support = it->support;
        } else {
            for (int c : mesh_.vertex_cells(carrier)) {
                if (scheme_.kind == SchemeKind::CGFEM && !cls.is_near[static_cast<std::size_t>(c)]) continue;
                blk.support.push_back(c);
            }
            std::sort(blk.support.begin(), blk.support.end());
        }
        const int bid = static_cast<int>(blocks_.size());
        for (const auto& [i, j] : mi) {
            EnrichedBasisFn f = proto;
            f.carrier = carrier;
            f.i = i;
            f.j = j;
            f.block = bid;
            if (scheme_.kind == SchemeKind::HoSGFEM) f.shift = mesh_.centroid(carrier);
            blk.raw.push_back(static_cast<int>(fns_.size()));
            fns_.push_back(f);
        }
        blk.combo = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(blk.raw.size()),
                                              static_cast<Eigen::Index>(blk.raw.size()));
        blocks_.push_back(std::move(blk));
    }
}

void EnrichmentSpace::precompute_local(const CellClassification& cls)
{
    local_.assign(static_cast<std::size_t>(mesh_.num_cells()), {});
    for (int b = 0; b < static_cast<int>(blocks_.size()); ++b) {
        const auto& blk = blocks_[static_cast<std::size_t>(b)];
        const auto& f0 = fns_[static_cast<std::size_t>(blk.raw.front())];
        int degree = 0;
        for (int r : blk.raw) {
            const auto& f = fns_[static_cast<std::size_t>(r)];
            degree = std::max(degree, 1 + f.i + f.j);
        }
        for (int c : blk.support) {
            // On an uncut cell next to a straight interface the feature is a
            // polynomial the interpolant reproduces, so the function is zero.
            if (f0.subtract_interpolant && !geom_.is_circle() && !cls.is_cut[static_cast<std::size_t>(c)] &&
                degree <= p_) {
                continue;
            }
            LocalData ld;
            ld.block = b;
            if (f0.pu == PUKind::Bernstein) {
                const auto it = std::find_if(pus_.begin(), pus_.end(),
                                             [&](const PUFunction& f) { return f.cell == blk.carrier; });
                ld.pu_coeffs = it->coefficients_on(mesh_, c);
            } else {
                const auto verts = mesh_.cell_vertices(c);
                ld.corner = static_cast<int>(std::find(verts.begin(), verts.end(), blk.carrier) - verts.begin());
            }
            if (f0.subtract_interpolant) {
                const auto nodes = mesh_.cell_nodes(c);
                ld.interp.resize(static_cast<Eigen::Index>(nodes.size()),
                                 static_cast<Eigen::Index>(blk.raw.size()));
                for (std::size_t k = 0; k < nodes.size(); ++k) {
                    const Point2 x = mesh_.node(nodes[k]);
                    const Side side = geom_.classify(x);
                    for (std::size_t r = 0; r < blk.raw.size(); ++r) {
                        double v;
                        Vec2 g;
                        feature(fns_[static_cast<std::size_t>(blk.raw[r])], x, side, v, g);
                        ld.interp(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) = v;
                    }
                }
            }
            local_[static_cast<std::size_t>(c)].push_back(std::move(ld));
        }
    }
}

void EnrichmentSpace::renumber()
{
    n_dofs_ = 0;
    dof_block_.clear();
    for (int b = 0; b < static_cast<int>(blocks_.size()); ++b) {
        auto& blk = blocks_[static_cast<std::size_t>(b)];
        blk.first_dof = n_dofs_;
        n_dofs_ += blk.n_out();
        dof_block_.insert(dof_block_.end(), static_cast<std::size_t>(blk.n_out()), b);
    }
}

void EnrichmentSpace::feature(const EnrichedBasisFn& f, Point2 x, Side side, double& v, Vec2& g) const
{
    if (f.distance == DistanceFlavor::OneSided && side == Side::Omega1) {
        v = 0.0;
        g = {0.0, 0.0};
        return;
    }
    const double off = geom_.signed_offset(x);
    const Vec2 n = geom_.offset_gradient(x);
    const double d = std::abs(off);
    const Vec2 dd = side == Side::Omega0 ? n * -1.0 : n;
    const double X = x.x - f.shift.x, Y = x.y - f.shift.y;
    const double m = ipow(X, f.i) * ipow(Y, f.j);
    const Vec2 dm{f.i > 0 ? f.i * ipow(X, f.i - 1) * ipow(Y, f.j) : 0.0,
                  f.j > 0 ? f.j * ipow(X, f.i) * ipow(Y, f.j - 1) : 0.0};
    v = d * m;
    g = dd * m + dm * d;
}

const EnrichmentSpace::LocalData* EnrichmentSpace::find_local(int block, int c) const
{
    for (const auto& ld : local_[static_cast<std::size_t>(c)]) {
        if (ld.block == block) return &ld;
    }
    return nullptr;
}

std::vector<int> EnrichmentSpace::active_blocks(int c) const
{
    std::vector<int> out;
    for (const auto& ld : local_[static_cast<std::size_t>(c)]) out.push_back(ld.block);
    return out;
}

void EnrichmentSpace::eval_local(const LocalData& ld, int c, Point2 x, Side side, Scratch& sc,
                                 std::vector<double>& values, std::vector<Vec2>* grads) const
{
    const auto& blk = blocks_[static_cast<std::size_t>(ld.block)];
    const auto& f0 = fns_[static_cast<std::size_t>(blk.raw.front())];
    const double scale = static_cast<double>(mesh_.n());
    const double s = sc.s, t = sc.t;

    double P = 0.0;
    Vec2 dP{0.0, 0.0};
    switch (f0.pu) {
    case PUKind::Hat: {
        const int a = ld.corner % 2, b = ld.corner / 2;
        const double hs = a ? s : 1.0 - s, ht = b ? t : 1.0 - t;
        P = hs * ht;
        dP = {(a ? 1.0 : -1.0) * ht, hs * (b ? 1.0 : -1.0)};
        break;
    }
    case PUKind::Hermite: {
        const int a = ld.corner % 2, b = ld.corner / 2;
        const double hs = basis1d::hermite(a, s), ht = basis1d::hermite(b, t);
        P = hs * ht;
        dP = {basis1d::hermite_deriv(a, s) * ht, hs * basis1d::hermite_deriv(b, t)};
        break;
    }
    case PUKind::Bernstein:
        for (std::size_t k = 0; k < ld.pu_coeffs.size(); ++k) {
            if (ld.pu_coeffs[k] == 0.0) continue;
            P += ld.pu_coeffs[k] * sc.bern[k];
            dP = dP + sc.bern_g[k] * ld.pu_coeffs[k];
        }
        break;
    }
    dP = dP * scale;

    double R = 1.0;
    Vec2 dR{0.0, 0.0};
    if (f0.ramp) {
        const auto verts = mesh_.cell_vertices(c);
        R = 0.0;
        for (int k = 0; k < 4; ++k) {
            if (!ramp_corner_[static_cast<std::size_t>(verts[static_cast<std::size_t>(k)])]) continue;
            const int a = k % 2, b = k / 2;
            const double hs = a ? s : 1.0 - s, ht = b ? t : 1.0 - t;
            R += hs * ht;
            dR = dR + Vec2{(a ? 1.0 : -1.0) * ht, hs * (b ? 1.0 : -1.0)} * scale;
        }
    }

    const std::size_t nraw = blk.raw.size();
    values.resize(nraw);
    if (grads) grads->resize(nraw);
    for (std::size_t r = 0; r < nraw; ++r) {
        double F;
        Vec2 dF;
        feature(fns_[static_cast<std::size_t>(blk.raw[r])], x, side, F, dF);
        if (f0.subtract_interpolant) {
            for (Eigen::Index k = 0; k < ld.interp.rows(); ++k) {
                const double w = ld.interp(k, static_cast<Eigen::Index>(r));
                F -= w * sc.lag[static_cast<std::size_t>(k)];
                dF = dF - sc.lag_g[static_cast<std::size_t>(k)] * (w * scale);
            }
        }
        values[r] = P * R * F;
        if (grads) (*grads)[r] = dP * (R * F) + dR * (P * F) + dF * (P * R);
    }
}

namespace {

void fill_scratch_basis(int p, bool lag, bool bern, double s, double t, std::vector<double>& lv,
                        std::vector<Vec2>& lg, std::vector<double>& bv, std::vector<Vec2>& bg)
{
    if (lag) ReferenceBasis(BasisKind::Lagrange, p).eval_all(s, t, lv, &lg);
    if (bern) ReferenceBasis(BasisKind::Bernstein, p).eval_all(s, t, bv, &bg);
}

}  // namespace

void EnrichmentSpace::eval_raw(int block, int c, Point2 x, Side side, std::vector<double>& values,
                               std::vector<Vec2>* grads) const
{
    const LocalData* ld = find_local(block, c);
    const auto nraw = blocks_[static_cast<std::size_t>(block)].raw.size();
    if (!ld) {
        values.assign(nraw, 0.0);
        if (grads) grads->assign(nraw, Vec2{0.0, 0.0});
        return;
    }
    Scratch sc;
    const Point2 st = mesh_.to_reference(c, x);
    sc.s = st.x;
    sc.t = st.y;
    fill_scratch_basis(p_, ld->interp.size() != 0, scheme_.kind == SchemeKind::HoSGFEM, sc.s, sc.t,
                       sc.lag, sc.lag_g, sc.bern, sc.bern_g);
    eval_local(*ld, c, x, side, sc, values, grads);
}

void EnrichmentSpace::eval_cell(int c, Point2 x, Side side, CellValues& out) const
{
    out.dofs.clear();
    out.values.clear();
    out.grads.clear();
    const auto& lds = local_[static_cast<std::size_t>(c)];
    if (lds.empty()) return;

    Scratch sc;
    const Point2 st = mesh_.to_reference(c, x);
    sc.s = st.x;
    sc.t = st.y;
    const bool sub = scheme_.kind == SchemeKind::SGFEM || scheme_.kind == SchemeKind::HoSGFEM;
    fill_scratch_basis(p_, sub, scheme_.kind == SchemeKind::HoSGFEM, sc.s, sc.t, sc.lag, sc.lag_g,
                       sc.bern, sc.bern_g);

    std::vector<double> rv;
    std::vector<Vec2> rg;
    for (const auto& ld : lds) {
        eval_local(ld, c, x, side, sc, rv, &rg);
        const auto& blk = blocks_[static_cast<std::size_t>(ld.block)];
        for (Eigen::Index o = 0; o < blk.combo.cols(); ++o) {
            double v = 0.0;
            Vec2 g{0.0, 0.0};
            for (Eigen::Index r = 0; r < blk.combo.rows(); ++r) {
                const double w = blk.combo(r, o);
                if (w == 0.0) continue;
                v += w * rv[static_cast<std::size_t>(r)];
                g = g + rg[static_cast<std::size_t>(r)] * w;
            }
            out.dofs.push_back(blk.first_dof + static_cast<int>(o));
            out.values.push_back(v);
            out.grads.push_back(g);
        }
    }
}

double EnrichmentSpace::eval_dof(int dof, Point2 x, Vec2* grad) const
{
    if (dof < 0 || dof >= n_dofs_) throw std::out_of_range("eval_dof: dof out of range");
    const int b = dof_block_[static_cast<std::size_t>(dof)];
    const auto& blk = blocks_[static_cast<std::size_t>(b)];
    const int c = locate_cell(mesh_, x);
    std::vector<double> rv;
    std::vector<Vec2> rg;
    eval_raw(b, c, x, geom_.classify(x), rv, &rg);
    const Eigen::Index o = dof - blk.first_dof;
    double v = 0.0;
    Vec2 g{0.0, 0.0};
    for (Eigen::Index r = 0; r < blk.combo.rows(); ++r) {
        v += blk.combo(r, o) * rv[static_cast<std::size_t>(r)];
        g = g + rg[static_cast<std::size_t>(r)] * blk.combo(r, o);
    }
    if (grad) *grad = g;
    return v;
}

namespace {

/// Extra points per direction for the local inner products.  Nearly
/// dependent raw functions on sliver cells amplify integration error, so
/// the rule goes beyond the assembly order.
constexpr int kGramBump = 6;

}  // namespace

void EnrichmentSpace::orthogonalize_block(int block, double drop_tol)
{
    auto& blk = blocks_[static_cast<std::size_t>(block)];
    std::vector<std::vector<double>> rows;
    std::vector<double> weights;
    std::vector<double> rv;
    for (int c : blk.support) {
        for (const auto& rule : cell_rule(mesh_, cls_, geom_, c, p_, kGramBump, true)) {
            for (std::size_t q = 0; q < rule.size(); ++q) {
                eval_raw(block, c, rule.points[q], rule.side, rv, nullptr);
                rows.push_back(rv);
                weights.push_back(rule.weights[q]);
            }
        }
    }
    const auto nraw = static_cast<Eigen::Index>(blk.raw.size());
    Eigen::MatrixXd V(static_cast<Eigen::Index>(rows.size()), nraw);
    for (std::size_t q = 0; q < rows.size(); ++q) {
        for (Eigen::Index r = 0; r < nraw; ++r) V(static_cast<Eigen::Index>(q), r) = rows[q][static_cast<std::size_t>(r)];
    }
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
    auto gs = gram_schmidt_local(V, w, drop_tol);
    blk.combo = blk.combo * gs.combo;
    dropped_ += gs.dropped;
    renumber();
}

EnrichmentSpace build_enrichment_space(const QuadMesh& mesh, const CellClassification& cls,
                                       const InterfaceGeometry& geom, const Scheme& scheme, int p)
{
    if (p < 1 || p > 5) throw std::invalid_argument("build_enrichment_space: p must be in [1, 5]");
    if (p != mesh.degree()) throw std::invalid_argument("build_enrichment_space: p differs from the mesh degree");
    return EnrichmentSpace(mesh, cls, geom, scheme);
}

// ---------------------------------------------------------------- Gram-Schmidt, LPCA

GramSchmidtResult gram_schmidt_local(const Eigen::MatrixXd& values, const Eigen::VectorXd& weights,
                                     double drop_tol)
{
    if (values.rows() != weights.size()) {
        throw std::invalid_argument("gram_schmidt_local: values and weights disagree in size");
    }
    const Eigen::Index n = values.cols();
    const Eigen::MatrixXd A = weights.cwiseSqrt().asDiagonal() * values;
    std::vector<Eigen::VectorXd> q, c;
    double ref = -1.0;
    GramSchmidtResult res;
    for (Eigen::Index l = 0; l < n; ++l) {
        Eigen::VectorXd v = A.col(l);
        Eigen::VectorXd coef = Eigen::VectorXd::Unit(n, l);
        if (ref < 0.0) ref = v.norm();
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < q.size(); ++k) {
                const double r = q[k].dot(v);
                v -= r * q[k];
                coef -= r * c[k];
            }
        }
        const double nrm = v.norm();
        if (!(nrm > drop_tol * ref) || nrm == 0.0) {
            ++res.dropped;
            continue;
        }
        q.push_back(v / nrm);
        c.push_back(coef / nrm);
    }
    res.combo.resize(n, static_cast<Eigen::Index>(c.size()));
    for (std::size_t k = 0; k < c.size(); ++k) res.combo.col(static_cast<Eigen::Index>(k)) = c[k];
    return res;
}

std::vector<Eigen::MatrixXd> lpca_condense(const std::vector<Eigen::MatrixXd>& blocks, double xi)
{
    std::vector<Eigen::MatrixXd> out;
    out.reserve(blocks.size());
    for (const auto& K : blocks) {
        if (xi <= 0.0) {
            out.push_back(Eigen::MatrixXd::Identity(K.rows(), K.cols()));
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (K + K.transpose()));
        const Eigen::VectorXd& lam = es.eigenvalues();
        const double total = lam.sum();
        std::vector<Eigen::Index> keep;
        // descending order, as the fractions are usually listed
        for (Eigen::Index j = lam.size() - 1; j >= 0; --j) {
            if (total > 0.0 && lam[j] / total >= xi) keep.push_back(j);
        }
        Eigen::MatrixXd V(K.rows(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t k = 0; k < keep.size(); ++k) V.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
        out.push_back(std::move(V));
    }
    return out;
}

}  // namespace ufem
