#include "bogolib/hartree.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

#include "bogolib/io.hpp"

namespace bogolib {

namespace {

void check_normalized(const Grid& grid, double norm2) {
  if (std::abs(norm2 - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "state is not normalized: ||u||^2 = " << norm2;
    throw ContractError(os.str());
  }
  (void)grid;
}

Vector gaussian_start(const Grid& grid, double width) {
  Vector u = grid.nodes().unaryExpr([&](double x) { return std::exp(-0.5 * x * x / (width * width)); });
  return u / grid.norm(u);
}

}  // namespace

double hartree_functional(const Model& model, const CVector& u) {
  const Grid& g = model.grid;
  g.check_length(u.size(), "energy");
  double kin = g.inner(u, apply_multiplier(g, model.kinetic, u)).real();
  Vector rho = u.cwiseAbs2();
  double pot = 0.5 * g.inner(rho, convolve(g, model.interaction, rho));
  return kin + pot;
}

double energy(const Model& model, const CVector& u) {
  check_normalized(model.grid, model.grid.norm(u) * model.grid.norm(u));
  return hartree_functional(model, u);
}

double energy(const Model& model, const Vector& u) {
  model.grid.check_length(u.size(), "energy");
  check_normalized(model.grid, model.grid.inner(u, u));
  return hartree_functional(model, CVector(u.cast<std::complex<double>>()));
}

Vector gradient(const Model& model, const Vector& u) {
  const Grid& g = model.grid;
  g.check_length(u.size(), "gradient");
  Vector vd = convolve(g, model.interaction, u.cwiseProduct(u));
  return apply_multiplier(g, model.kinetic, u) + vd.cwiseProduct(u);
}

double chemical_potential(const Model& model, const Vector& u) {
  const Grid& g = model.grid;
  Vector rho = u.cwiseProduct(u);
  return g.inner(u, apply_multiplier(g, model.kinetic, u)) +
         g.inner(rho, convolve(g, model.interaction, rho));
}

double edge_ratio(const Vector& u) {
  double m = u.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  return std::abs(u(0)) / m;
}

double mass_median(const Grid& grid, const Vector& u) {
  grid.check_length(u.size(), "mass_median");
  Vector m = u.cwiseProduct(u);
  double total = m.sum();
  if (!(total > 0.0)) throw ContractError("mass_median of a zero state");
  m /= total;
  const double dx = grid.spacing();
  double cum = 0.0;
  for (Index i = 0; i < m.size(); ++i) {
    if (cum + m(i) >= 0.5) {
      double frac = m(i) > 0.0 ? (0.5 - cum) / m(i) : 0.5;
      return grid.nodes()(i) - 0.5 * dx + frac * dx;
    }
    cum += m(i);
  }
  return grid.nodes()(m.size() - 1) + 0.5 * dx;
}

Vector center(const Grid& grid, const Vector& u) {
  grid.check_length(u.size(), "center");
  const Index n = grid.size();
  Index imax;
  u.cwiseAbs().maxCoeff(&imax);
  Index s = grid.center_index() - imax;
  Vector rolled(n);
  for (Index i = 0; i < n; ++i) rolled(((i + s) % n + n) % n) = u(i);
  double xm = mass_median(grid, rolled);
  Vector out = spectral_shift(grid, rolled, -xm);
  if (out.sum() < 0.0) out = -out;
  return out;
}

HartreeState minimize(std::shared_ptr<const Model> model, const MinimizeConfig& cfg) {
  if (!model) throw ContractError("minimize: null model");
  const Model& mdl = *model;
  const Grid& g = mdl.grid;
  mdl.interaction.validate(g);
  if (cfg.max_iter < 0 || !(cfg.tol > 0.0) || !(cfg.tau > 0.0))
    throw ContractError("minimize: bad solver configuration");

  const Vector tsym = kinetic_symbol(g, mdl.kinetic);
  HartreeState st;
  st.model = model;
  Vector u = gaussian_start(g, cfg.initial_width);
  double e = energy(mdl, u);
  double tau = cfg.tau;
  double res = 0.0, mu = 0.0;
  Index it = 0;
  for (;; ++it) {
    Vector vd = convolve(g, mdl.interaction, u.cwiseProduct(u));
    Vector grad = apply_multiplier(g, mdl.kinetic, u) + vd.cwiseProduct(u);
    mu = g.inner(u, grad);
    res = g.norm(Vector(grad - mu * u));
    if (res <= cfg.tol) break;
    if (it >= cfg.max_iter) {
      st.u0 = u;
      st.e_H = e;
      st.mu_H = mu;
      st.el_residual = res;
      st.iterations = it;
      std::ostringstream os;
      os << "Hartree minimization did not converge after " << it << " iterations (residual "
         << res << ")";
      throw HartreeNonConvergence(os.str(), st);
    }
    // explicit nonlinear part, implicit kinetic part
    Vector rhs = u - tau * (vd.cwiseProduct(u) - mu * u);
    for (;;) {
      CVector spec = forward_transform(g, rhs.cast<std::complex<double>>());
      spec.array() /= (1.0 + tau * tsym.array());
      Vector trial = inverse_transform(g, spec).real();
      trial /= g.norm(trial);
      double et = energy(mdl, trial);
      bool accept;
      if (res > 1e-6) {
        accept = et <= e + 1e-14 * std::max(1.0, std::abs(e));
      } else {
        // energy changes are at roundoff level here; decide on the residual instead
        Vector gt = gradient(mdl, trial);
        accept = g.norm(Vector(gt - g.inner(trial, gt) * trial)) < res &&
                 et <= e + 1e-13 * std::max(1.0, std::abs(e));
      }
      if (accept) {
        u = trial;
        e = et;
        st.energy_trace.push_back(e);
        tau = std::min(tau * 1.25, cfg.tau_max);
        break;
      }
      tau *= 0.5;
      if (tau < cfg.tau_min) {
        st.u0 = u;
        st.e_H = e;
        st.mu_H = mu;
        st.el_residual = res;
        st.iterations = it;
        std::ostringstream os;
        os << "Hartree step size underflow at iteration " << it << " (residual " << res << ")";
        throw HartreeNonConvergence(os.str(), st);
      }
      rhs = u - tau * (vd.cwiseProduct(u) - mu * u);
    }
  }

  bool localized = !mdl.interaction.is_zero() && edge_ratio(u) < 1e-6;
  if (localized) {
    u = center(g, u);
    u /= g.norm(u);
  } else if (u.sum() < 0.0) {
    u = -u;
  }
  st.u0 = u;
  st.centered = localized;
  st.converged = true;
  st.iterations = it;
  st.e_H = energy(mdl, u);
  st.mu_H = chemical_potential(mdl, u);
  st.el_residual = g.norm(Vector(gradient(mdl, u) - st.mu_H * u));
  return st;
}

double mcguire_exact(int N, double lambda) {
  if (N < 2) throw ContractError("McGuire energy needs N >= 2");
  if (!(lambda > 0.0)) throw ContractError("McGuire energy needs lambda > 0");
  double n = N;
  return -(lambda * lambda / 48.0) * n * (n * n - 1.0) / ((n - 1.0) * (n - 1.0));
}

void save_state(const std::filesystem::path& stem, const HartreeState& s) {
  auto bin = stem;
  bin += ".bin";
  auto js = stem;
  js += ".json";
  write_field(bin, s.grid(), s.u0);
  nlohmann::ordered_json j;
  j["e_H"] = s.e_H;
  j["mu_H"] = s.mu_H;
  j["el_residual"] = s.el_residual;
  j["iterations"] = s.iterations;
  j["centered"] = s.centered;
  j["converged"] = s.converged;
  j["model_hash"] = s.model->hash();
  j["version"] = kLibraryVersion;
  write_text(js, dump_json(j) + "\n");
}

HartreeState load_state(const std::filesystem::path& stem, std::shared_ptr<const Model> model) {
  auto bin = stem;
  bin += ".bin";
  auto js = stem;
  js += ".json";
  auto j = nlohmann::json::parse(read_text(js));
  if (j.at("model_hash").get<std::string>() != model->hash())
    throw Error("cached state belongs to a different model");
  if (j.value("version", std::string()) != kLibraryVersion)
    throw Error("cached state was written by a different library version");
  FieldFile f = read_field(bin);
  if (f.n_points != model->grid.size() || f.box_length != model->grid.box_length())
    throw Error("cached field does not match the model grid");
  HartreeState s;
  s.model = std::move(model);
  s.u0 = f.values;
  s.e_H = j.at("e_H").get<double>();
  s.mu_H = j.at("mu_H").get<double>();
  s.el_residual = j.at("el_residual").get<double>();
  s.iterations = j.at("iterations").get<Index>();
  s.centered = j.at("centered").get<bool>();
  s.converged = j.at("converged").get<bool>();
  return s;
}

}  // namespace bogolib
