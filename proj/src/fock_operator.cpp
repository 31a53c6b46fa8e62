#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <thread>

#include "bogolib/fock.hpp"

namespace bogolib {

namespace {

using Tuple = std::array<int, 2>;

std::vector<Tuple> tuples(int arity, Index m) {
  std::vector<Tuple> out;
  if (arity == 0) {
    out.push_back({-1, -1});
  } else if (arity == 1) {
    for (int i = 0; i < m; ++i) out.push_back({i, -1});
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) out.push_back({i, j});
  }
  return out;
}

Index power(Index m, int k) {
  Index r = 1;
  for (int i = 0; i < k; ++i) r *= m;
  return r;
}

template <class F>
void parallel_rows(Index n, F&& body) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  Index chunks = std::min<Index>(hw, std::max<Index>(1, n / 4096));
  if (chunks <= 1) {
    body(Index{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  Index step = (n + chunks - 1) / chunks;
  for (Index c = 0; c < chunks; ++c) {
    Index lo = c * step, hi = std::min(n, lo + step);
    if (lo < hi) pool.emplace_back([&, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

struct FockOperator::Compiled {
  int c = 0, a = 0;
  std::vector<Tuple> ct, at;
  Matrix W;  // ct.size() x at.size(), folded over pair symmetry
  std::vector<std::vector<std::pair<int, double>>> rows;  // nonzeros of W per creator tuple
  std::vector<std::vector<std::pair<int, double>>> cols;  // nonzeros of W per annihilator tuple
  Vector f;
  bool hermitize = false;
};

FockOperator::FockOperator(std::shared_ptr<const FockBasis> basis, std::string label)
    : basis_(std::move(basis)), label_(std::move(label)) {
  if (!basis_) throw ContractError("FockOperator: null basis");
}

void FockOperator::add_term(FockTerm term) {
  const Index m = basis_->modes();
  const Index M = basis_->cutoff();
  if (term.n_create < 0 || term.n_create > 2 || term.n_annihilate < 0 || term.n_annihilate > 2)
    throw ContractError("FockOperator: only up to two creators and two annihilators per term");
  const int c = term.n_create, a = term.n_annihilate;
  if (static_cast<Index>(term.coeff.size()) != power(m, c + a)) {
    std::ostringstream os;
    os << "FockOperator: term '" << term.label << "' has " << term.coeff.size()
       << " coefficients, expected " << power(m, c + a);
    throw ContractError(os.str());
  }
  if (term.right_factor.size() != 0 && term.right_factor.size() != M + 1)
    throw ContractError("FockOperator: right factor must have M + 1 entries");

  auto cp = std::make_shared<Compiled>();
  cp->c = c;
  cp->a = a;
  cp->ct = tuples(c, m);
  cp->at = tuples(a, m);
  cp->f = term.right_factor.size() ? term.right_factor : Vector::Ones(M + 1);
  cp->W = Matrix::Zero(static_cast<Index>(cp->ct.size()), static_cast<Index>(cp->at.size()));
  // flat index of an ordered (creators..., annihilators...) tuple
  auto flat = [&](const std::array<int, 4>& idx, int len) {
    Index f = 0;
    for (int i = 0; i < len; ++i) f = f * m + idx[static_cast<std::size_t>(i)];
    return static_cast<std::size_t>(f);
  };
  auto perms = [](const Tuple& t, int arity) {
    std::vector<Tuple> out;
    if (arity < 2 || t[0] == t[1]) {
      out.push_back(t);
    } else {
      out.push_back(t);
      out.push_back({t[1], t[0]});
    }
    return out;
  };
  for (std::size_t p = 0; p < cp->ct.size(); ++p)
    for (std::size_t q = 0; q < cp->at.size(); ++q) {
      double w = 0.0;
      for (const auto& ci : perms(cp->ct[p], c))
        for (const auto& ai : perms(cp->at[q], a)) {
          std::array<int, 4> idx{};
          int len = 0;
          for (int i = 0; i < c; ++i) idx[static_cast<std::size_t>(len++)] = ci[static_cast<std::size_t>(i)];
          for (int i = 0; i < a; ++i) idx[static_cast<std::size_t>(len++)] = ai[static_cast<std::size_t>(i)];
          w += term.coeff[flat(idx, len)];
        }
      cp->W(static_cast<Index>(p), static_cast<Index>(q)) = w;
    }
  cp->hermitize = term.hermitize;
  if (cp->hermitize && c == a) {
    // number conserving with a symmetric coefficient: already self-adjoint
    double scale = std::max(1e-300, cp->W.cwiseAbs().maxCoeff());
    if ((cp->W - cp->W.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * scale) cp->hermitize = false;
  }
  cp->rows.resize(cp->ct.size());
  cp->cols.resize(cp->at.size());
  for (std::size_t p = 0; p < cp->ct.size(); ++p)
    for (std::size_t q = 0; q < cp->at.size(); ++q) {
      double w = cp->W(static_cast<Index>(p), static_cast<Index>(q));
      if (w != 0.0) {
        cp->rows[p].push_back({static_cast<int>(q), w});
        cp->cols[q].push_back({static_cast<int>(p), w});
      }
    }
  terms_.push_back(std::move(term));
  compiled_.push_back(cp);
}

// Calls sink(target_full, value) for every H[s, t] contribution of row s (compact index c).
template <class Sink>
void FockOperator::row(Index c, Sink&& sink) const {
  const FockBasis& b = *basis_;
  const Index s = b.full(c);
  const int ns = b.total(s);

  // lowers the tuple t from state f; returns target and amplitude
  auto lower = [&](Index f, const Tuple& t, int arity, double& amp) -> Index {
    amp = 1.0;
    for (int i = 0; i < arity && f >= 0; ++i) {
      int mode = t[static_cast<std::size_t>(i)];
      int n = b.occupation(f, mode);
      if (n == 0) return -1;
      amp *= std::sqrt(double(n));
      f = b.annihilate(f, mode);
    }
    return f;
  };
  auto raise = [&](Index f, const Tuple& t, int arity, double& amp) -> Index {
    amp = 1.0;
    for (int i = 0; i < arity && f >= 0; ++i) {
      int mode = t[static_cast<std::size_t>(i)];
      int n = b.occupation(f, mode);
      Index g = b.create(f, mode);
      if (g < 0) return -1;
      amp *= std::sqrt(double(n + 1));
      f = g;
    }
    return f;
  };

  for (const auto& cpp : compiled_) {
    const Compiled& cp = *cpp;
    const double half = cp.hermitize ? 0.5 : 1.0;
    // X[s, t]: lower creator tuple from s, raise annihilator tuple
    for (std::size_t p = 0; p < cp.ct.size(); ++p) {
      if (cp.rows[p].empty()) continue;
      double al;
      Index r = lower(s, cp.ct[p], cp.c, al);
      if (r < 0) continue;
      for (const auto& [q, w] : cp.rows[p]) {
        double be;
        Index t = raise(r, cp.at[static_cast<std::size_t>(q)], cp.a, be);
        if (t < 0) continue;
        sink(t, half * w * al * be * cp.f(b.total(t)));
      }
    }
    if (!cp.hermitize) continue;
    // X^dagger[s, t]: lower annihilator tuple from s, raise creator tuple, factor at s
    const double fs = cp.f(ns);
    if (fs == 0.0) continue;
    for (std::size_t q = 0; q < cp.at.size(); ++q) {
      if (cp.cols[q].empty()) continue;
      double al;
      Index r = lower(s, cp.at[q], cp.a, al);
      if (r < 0) continue;
      for (const auto& [p, w] : cp.cols[q]) {
        double be;
        Index t = raise(r, cp.ct[static_cast<std::size_t>(p)], cp.c, be);
        if (t < 0) continue;
        sink(t, half * w * al * be * fs);
      }
    }
  }
}

void FockOperator::apply(const Vector& x, Vector& y) const {
  const Index n = dim();
  if (x.size() != n) throw ContractError("FockOperator::apply: vector size mismatch");
  y.resize(n);
  const FockBasis& b = *basis_;
  bool leaked = false;
  parallel_rows(n, [&](Index lo, Index hi) {
    for (Index c = lo; c < hi; ++c) {
      double acc = 0.0;
      row(c, [&](Index t, double v) {
        Index ct = b.compact(t);
        if (ct < 0) {
          leaked = true;
          return;
        }
        acc += v * x(ct);
      });
      y(c) = acc;
    }
  });
  if (leaked) throw ContractError("FockOperator '" + label_ + "' does not preserve the basis sector");
}

std::vector<Triplet> FockOperator::triplets() const {
  const Index n = dim();
  const FockBasis& b = *basis_;
  std::vector<Triplet> out;
  std::vector<std::pair<Index, double>> buf;
  for (Index c = 0; c < n; ++c) {
    buf.clear();
    row(c, [&](Index t, double v) {
      Index ct = b.compact(t);
      if (ct < 0) throw ContractError("FockOperator '" + label_ + "' does not preserve the basis sector");
      buf.push_back({ct, v});
    });
    std::sort(buf.begin(), buf.end(), [](const auto& u, const auto& v) { return u.first < v.first; });
    for (std::size_t i = 0; i < buf.size();) {
      Index col = buf[i].first;
      double v = 0.0;
      while (i < buf.size() && buf[i].first == col) v += buf[i++].second;
      if (v != 0.0) out.push_back({c, col, v});
    }
  }
  return out;
}

SparseMatrix FockOperator::to_sparse() const {
  std::vector<Eigen::Triplet<double>> t;
  for (const auto& e : triplets()) t.emplace_back(e.row, e.col, e.value);
  SparseMatrix m(dim(), dim());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

FockOperator FockOperator::combined(double alpha, const FockOperator& other, double beta,
                                    const std::string& label) const {
  if (other.basis_ != basis_) throw ContractError("FockOperator::combined: different bases");
  FockOperator out(basis_, label);
  for (auto t : terms_) {
    for (auto& w : t.coeff) w *= alpha;
    out.add_term(std::move(t));
  }
  for (auto t : other.terms_) {
    for (auto& w : t.coeff) w *= beta;
    out.add_term(std::move(t));
  }
  return out;
}

LadderOps creation_ops(const FockBasis& b) {
  LadderOps ops;
  const Index n = b.full_size();
  for (Index i = 0; i < b.modes(); ++i) {
    std::vector<Eigen::Triplet<double>> cr, an;
    for (Index s = 0; s < n; ++s) {
      Index t = b.create(s, i);
      if (t >= 0) cr.emplace_back(t, s, std::sqrt(double(b.occupation(s, i) + 1)));
      Index u = b.annihilate(s, i);
      if (u >= 0) an.emplace_back(u, s, std::sqrt(double(b.occupation(s, i))));
    }
    SparseMatrix c(n, n), a(n, n);
    c.setFromTriplets(cr.begin(), cr.end());
    a.setFromTriplets(an.begin(), an.end());
    ops.create.push_back(std::move(c));
    ops.annihilate.push_back(std::move(a));
  }
  return ops;
}

}  // namespace bogolib
