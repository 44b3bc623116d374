#include "beameval/fem.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "beameval/document.hpp"

namespace beameval::fem {

namespace {

constexpr int kDofsPerNode = 3;
constexpr double kPivotThreshold = 1e-12;

// Assembly and solve run in extended precision: reactions are K*u - F, and
// short stiff elements next to large rigid-body displacements cancel many
// digits in that product.
using Real = long double;
using Matrix6 = Eigen::Matrix<Real, 6, 6>;
using Vector6 = Eigen::Matrix<Real, 6, 1>;
using MatrixX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

constexpr int kRefinementSteps = 2;

Matrix6 element_stiffness(const SectionProperties& s, Real L) {
    const Real ea = Real(s.E) * s.A / L;
    const Real ei = Real(s.E) * s.I;
    const Real k1 = 12 * ei / (L * L * L);
    const Real k2 = 6 * ei / (L * L);
    const Real k3 = 4 * ei / L;
    const Real k4 = 2 * ei / L;

    Matrix6 k = Matrix6::Zero();
    k(0, 0) = ea;  k(0, 3) = -ea;
    k(3, 0) = -ea; k(3, 3) = ea;

    k(1, 1) = k1;  k(1, 2) = k2;  k(1, 4) = -k1; k(1, 5) = k2;
    k(2, 1) = k2;  k(2, 2) = k3;  k(2, 4) = -k2; k(2, 5) = k4;
    k(4, 1) = -k1; k(4, 2) = -k2; k(4, 4) = k1;  k(4, 5) = -k2;
    k(5, 1) = k2;  k(5, 2) = k4;  k(5, 4) = -k2; k(5, 5) = k3;
    return k;
}

Vector6 equivalent_loads(Real q, Real L) {
    Vector6 f = Vector6::Zero();
    f(1) = q * L / 2;
    f(2) = q * L * L / 12;
    f(4) = q * L / 2;
    f(5) = -q * L * L / 12;
    return f;
}

}  // namespace

std::size_t MeshedBeam::node_at(double x) const {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), x);
    if (it == nodes.end() || *it != x)
        throw std::out_of_range(fmt::format("no node at {} m", format_number(x)));
    return static_cast<std::size_t>(it - nodes.begin());
}

MeshedBeam mesh(const BeamModel& model, const MeshOverrides& overrides) {
    if (auto err = check_geometry(model)) throw *err;

    MeshedBeam m;
    m.span_m = model.span_m;
    m.nodes = {0.0, model.span_m};
    for (const auto& s : model.supports) m.nodes.push_back(s.position_m);
    for (const auto& l : model.loads) {
        m.nodes.push_back(load_start(l));
        m.nodes.push_back(load_end(l));
    }
    for (double x : overrides.extra_nodes) {
        if (!(x >= 0.0 && x <= model.span_m))
            throw ValidationError(ValidationErrorKind::OutOfBounds,
                                  fmt::format("mesh node {} m off the beam", format_number(x)));
        m.nodes.push_back(x);
    }
    std::sort(m.nodes.begin(), m.nodes.end());
    m.nodes.erase(std::unique(m.nodes.begin(), m.nodes.end()), m.nodes.end());

    const SectionProperties section = overrides.section.value_or(SectionProperties{});
    for (std::size_t i = 0; i + 1 < m.nodes.size(); ++i) {
        Element e{i, i + 1, section, 0.0};
        for (const auto& l : model.loads)
            if (const auto* u = std::get_if<DistributedLoad>(&l);
                u && u->start_m <= m.nodes[i] && u->end_m >= m.nodes[i + 1])
                e.q += sign_of(u->direction) * u->intensity_kN_per_m;
        m.elements.push_back(e);
    }

    m.support_count = model.supports.size();
    for (std::size_t i = 0; i < model.supports.size(); ++i) {
        const auto& s = model.supports[i];
        m.support_kinds.push_back(s.kind);
        m.constraints.push_back({m.node_at(s.position_m), i, s.kind != SupportKind::Roller, true,
                                 s.kind == SupportKind::Fixed});
    }
    for (const auto& l : model.loads)
        if (const auto* p = std::get_if<PointLoad>(&l))
            m.nodal_forces.push_back({m.node_at(p->position_m), sign_of(p->direction) * p->magnitude_kN});
    return m;
}

Solution solve(const MeshedBeam& mesh) {
    const auto n = static_cast<Eigen::Index>(mesh.nodes.size() * kDofsPerNode);
    MatrixX K = MatrixX::Zero(n, n);
    VectorX F = VectorX::Zero(n);

    for (const auto& e : mesh.elements) {
        const Real L = Real(mesh.nodes[e.second]) - Real(mesh.nodes[e.first]);
        if (!(L > 0.0)) throw std::invalid_argument("element with non-positive length");
        const auto s = e.section;
        if (!(s.E > 0.0 && s.A > 0.0 && s.I > 0.0))
            throw std::invalid_argument("section properties must be positive");
        const Matrix6 ke = element_stiffness(s, L);
        const Vector6 fe = equivalent_loads(e.q, L);
        const Eigen::Index base[2] = {static_cast<Eigen::Index>(e.first * kDofsPerNode),
                                      static_cast<Eigen::Index>(e.second * kDofsPerNode)};
        for (int a = 0; a < 6; ++a) {
            const Eigen::Index ga = base[a / 3] + a % 3;
            F(ga) += fe(a);
            for (int b = 0; b < 6; ++b) K(ga, base[b / 3] + b % 3) += ke(a, b);
        }
    }
    for (const auto& f : mesh.nodal_forces)
        F(static_cast<Eigen::Index>(f.node * kDofsPerNode + 1)) += f.fy;

    std::vector<bool> restrained(static_cast<std::size_t>(n), false);
    for (const auto& c : mesh.constraints) {
        const auto base = c.node * kDofsPerNode;
        if (c.ux) restrained[base] = true;
        if (c.uy) restrained[base + 1] = true;
        if (c.rz) restrained[base + 2] = true;
    }
    std::vector<Eigen::Index> free_dofs;
    for (Eigen::Index i = 0; i < n; ++i)
        if (!restrained[static_cast<std::size_t>(i)]) free_dofs.push_back(i);

    const auto nf = static_cast<Eigen::Index>(free_dofs.size());
    MatrixX Kff(nf, nf);
    VectorX Ff(nf);
    for (Eigen::Index i = 0; i < nf; ++i) {
        Ff(i) = F(free_dofs[i]);
        for (Eigen::Index j = 0; j < nf; ++j) Kff(i, j) = K(free_dofs[i], free_dofs[j]);
    }

    VectorX u = VectorX::Zero(n);
    if (nf > 0) {
        const Real max_diag = Kff.diagonal().cwiseAbs().maxCoeff();
        Eigen::PartialPivLU<MatrixX> lu(Kff);
        const Real min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
        if (!(min_pivot > kPivotThreshold * max_diag))
            throw SingularStiffness(fmt::format(
                "stiffness matrix is singular (pivot {:.3g} vs diagonal {:.3g}): the supports "
                "leave a rigid-body mode", static_cast<double>(min_pivot), static_cast<double>(max_diag)));
        VectorX uf = lu.solve(Ff);
        for (int step = 0; step < kRefinementSteps; ++step) uf += lu.solve(Ff - Kff * uf);
        for (Eigen::Index i = 0; i < nf; ++i) u(free_dofs[i]) = uf(i);
    }

    const VectorX residual = K * u - F;

    Solution sol;
    sol.displacements.resize(mesh.nodes.size());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        const auto b = static_cast<Eigen::Index>(i * kDofsPerNode);
        sol.displacements[i] = {static_cast<double>(u(b)), static_cast<double>(u(b + 1)),
                                static_cast<double>(u(b + 2))};
    }
    for (const auto& c : mesh.constraints) {
        const auto b = static_cast<Eigen::Index>(c.node * kDofsPerNode);
        Reaction r;
        r.support_index = c.support_index;
        r.vertical_kN = static_cast<double>(residual(b + 1));
        if (c.ux) r.horizontal_kN = static_cast<double>(residual(b));
        if (c.rz) r.moment_kNm = static_cast<double>(residual(b + 2));
        sol.reactions.entries.push_back(r);
    }
    std::sort(sol.reactions.entries.begin(), sol.reactions.entries.end(),
              [](const Reaction& a, const Reaction& b) { return a.support_index < b.support_index; });
    return sol;
}

Solution analyze(const BeamModel& model, const MeshOverrides& overrides) {
    return solve(mesh(model, overrides));
}

ModelDocument model_document_from_json(const nlohmann::json& doc) {
    ModelDocument out;
    out.model = model_from_json(doc);
    const auto it = doc.find("mesh");
    if (it == doc.end() || it->is_null()) return out;
    if (!it->is_object()) throw ParseError("mesh", 0, "'mesh' must be an object");

    if (const auto nodes = it->find("extra_nodes"); nodes != it->end()) {
        if (!nodes->is_array()) throw ParseError("mesh.extra_nodes", 0, "'mesh.extra_nodes' must be a list");
        for (std::size_t i = 0; i < nodes->size(); ++i) {
            if (!(*nodes)[i].is_number())
                throw ParseError(fmt::format("mesh.extra_nodes[{}]", i), 0, "mesh node must be a number");
            out.overrides.extra_nodes.push_back((*nodes)[i].get<double>());
        }
    }
    if (const auto sec = it->find("section"); sec != it->end()) {
        if (!sec->is_object()) throw ParseError("mesh.section", 0, "'mesh.section' must be an object");
        SectionProperties props;
        const std::pair<const char*, double*> fields[] = {{"E", &props.E}, {"A", &props.A}, {"I", &props.I}};
        for (auto [key, target] : fields) {
            if (const auto v = sec->find(key); v != sec->end()) {
                if (!v->is_number() || !(v->get<double>() > 0.0))
                    throw ParseError(fmt::format("mesh.section.{}", key), 0,
                                     "section properties must be positive numbers");
                *target = v->get<double>();
            }
        }
        out.overrides.section = props;
    }
    return out;
}

ModelDocument parse_model_document(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("", 0, e.what());
    }
    return model_document_from_json(doc);
}

nlohmann::ordered_json model_document_to_json(const ModelDocument& doc) {
    auto out = model_to_json(doc.model);
    if (doc.overrides.extra_nodes.empty() && !doc.overrides.section) return out;
    nlohmann::ordered_json m;
    if (!doc.overrides.extra_nodes.empty()) m["extra_nodes"] = doc.overrides.extra_nodes;
    if (doc.overrides.section) {
        m["section"]["E"] = doc.overrides.section->E;
        m["section"]["A"] = doc.overrides.section->A;
        m["section"]["I"] = doc.overrides.section->I;
    }
    out["mesh"] = std::move(m);
    return out;
}

}  // namespace beameval::fem
