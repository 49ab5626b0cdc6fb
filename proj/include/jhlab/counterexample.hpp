#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "extremal.hpp"
#include "jh_space.hpp"
#include "matrix.hpp"
#include "scalar.hpp"
#include "sigma.hpp"
#include "tensor.hpp"
#include "tree.hpp"

namespace jhlab {

/*
 * Index conventions.
 *
 * Global indices i, j run over 1, 2, 3, ... and are grouped into blocks:
 * block k holds s_{k-1} < i <= s_k with s_k = k(k+1)/2.  Block matrices R_k
 * are k x k and are addressed with local indices i - s_{k-1}.
 */

inline std::size_t triangular(std::size_t k) { return k * (k + 1) / 2; }

/// The block k with s_{k-1} < i <= s_k.
inline std::size_t block_of(std::size_t i) {
  if (i == 0) throw Error(ErrorKind::invalid_index, "global indices start at 1");
  std::size_t k = 1;
  while (triangular(k) < i) ++k;
  return k;
}

/// k -> n_k.
using LevelRule = std::function<std::size_t(std::size_t)>;

inline LevelRule linear_levels(std::size_t factor = 2) {
  return [factor](std::size_t k) { return factor * k; };
}

inline LevelRule explicit_levels(std::vector<std::size_t> levels) {
  return [levels = std::move(levels)](std::size_t k) {
    if (k == 0 || k > levels.size())
      throw Error(ErrorKind::invalid_rule, "no level given for block " + std::to_string(k));
    return levels[k - 1];
  };
}

struct Scaffold {
  std::size_t k_max = 0;
  std::vector<std::size_t> levels;  // n_k at [k-1]
  std::vector<Node> psi;            // psi_k at [k-1]
  std::vector<Node> phi;            // phi_i at [i-1], i <= s_{k_max}
  std::vector<Branch> gamma;        // gamma_i at [i-1]
  std::size_t universe_depth = 0;

  std::size_t n(std::size_t k) const { return levels.at(k - 1); }
  const Node& psi_node(std::size_t k) const { return psi.at(k - 1); }
  const Node& phi_node(std::size_t i) const { return phi.at(i - 1); }
  const Branch& gamma_branch(std::size_t i) const { return gamma.at(i - 1); }
  std::size_t index_count() const { return phi.size(); }
};

/// psi_1 = 0, psi_k = 1^{k-1} 0.  phi_{s_{k-1}+t} is psi_k followed by the
/// (n_k - k)-bit binary code of t - 1; gamma_i continues phi_i with zeros to
/// depth max n_k + 1.
inline Scaffold build_scaffold(std::size_t k_max, const LevelRule& rule = linear_levels()) {
  if (k_max == 0) throw Error(ErrorKind::invalid_input, "k_max must be at least 1");
  Scaffold sc;
  sc.k_max = k_max;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const std::size_t nk = rule(k);
    if (nk < k) throw Error(ErrorKind::invalid_rule, "n_" + std::to_string(k) + " = " + std::to_string(nk) + " is shorter than psi_" + std::to_string(k));
    if (!sc.levels.empty() && nk <= sc.levels.back())
      throw Error(ErrorKind::invalid_rule, "level rule is not strictly increasing at k = " + std::to_string(k));
    const std::size_t width = nk - k;
    if (width < 8 * sizeof(std::size_t) - 1 && (std::size_t{1} << width) < k)
      throw Error(ErrorKind::invalid_rule, "no room for " + std::to_string(k) + " distinct descendants of psi_" +
                                               std::to_string(k) + " at level " + std::to_string(nk));
    sc.levels.push_back(nk);
    sc.psi.push_back(Node(std::string(k - 1, '1') + "0"));
  }
  sc.universe_depth = sc.levels.back() + 1;

  for (std::size_t k = 1; k <= k_max; ++k) {
    const std::size_t width = sc.n(k) - k;
    for (std::size_t t = 1; t <= k; ++t) {
      std::string code(width, '0');
      const std::size_t value = t - 1;
      for (std::size_t b = 0; b < width && b < 64; ++b)
        if (value >> b & 1) code[width - 1 - b] = '1';
      Node phi = sc.psi_node(k).extended(code);
      sc.gamma.push_back(Branch::zeros_after(phi, sc.universe_depth));
      sc.phi.push_back(std::move(phi));
    }
  }
  return sc;
}

/// phi(i, k): the node of length n_k on gamma_i (requires i <= s_k).
inline Node node_on_branch_at(const Scaffold& sc, std::size_t i, std::size_t k) {
  if (k == 0 || k > sc.k_max) throw Error(ErrorKind::invalid_index, "block " + std::to_string(k) + " outside scaffold");
  if (i == 0 || i > triangular(k))
    throw Error(ErrorKind::invalid_index, "phi(" + std::to_string(i) + ", " + std::to_string(k) + ") needs i <= s_k");
  return sc.gamma_branch(i).node_at(sc.n(k));
}

/// R_1, R_2, ... with R_k of size k, and sum_k sigma(R_k).
template <Scalar S>
class MatrixSchedule {
 public:
  explicit MatrixSchedule(std::vector<Matrix<S>> blocks) : blocks_(std::move(blocks)), summed_sigma_(0) {
    for (std::size_t k = 1; k <= blocks_.size(); ++k) {
      if (blocks_[k - 1].size() != k)
        throw Error(ErrorKind::invalid_input, "schedule block " + std::to_string(k) + " has size " +
                                                  std::to_string(blocks_[k - 1].size()));
      summed_sigma_ += sigma_exact(blocks_[k - 1]);
    }
  }

  std::size_t count() const noexcept { return blocks_.size(); }
  const Matrix<S>& block(std::size_t k) const {
    if (k == 0 || k > blocks_.size()) throw Error(ErrorKind::invalid_index, "schedule has no block " + std::to_string(k));
    return blocks_[k - 1];
  }
  const S& summed_sigma() const noexcept { return summed_sigma_; }

 private:
  std::vector<Matrix<S>> blocks_;
  S summed_sigma_;
};

/// Random small rationals p/q, |p| <= 9, 1 <= q <= 6.
template <Scalar S>
Matrix<S> random_rational_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 6);
  Matrix<S> m(n);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) m(i, j) = scalar_traits<S>::from_ratio(num(rng), den(rng));
  return m;
}

template <Scalar S>
MatrixSchedule<S> random_schedule(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Matrix<S>> blocks;
  for (std::size_t k = 1; k <= count; ++k) blocks.push_back(random_rational_matrix<S>(k, rng));
  return MatrixSchedule<S>(std::move(blocks));
}

/// R_k = M_{r_m} / 2^m when k = r_m (m is 1-based), zero otherwise.
template <Scalar S>
MatrixSchedule<S> divergent_schedule(std::size_t count, std::span<const std::size_t> r_seq,
                                     const std::function<Matrix<S>(std::size_t)>& lemma2_family) {
  for (std::size_t m = 1; m < r_seq.size(); ++m)
    if (r_seq[m] <= r_seq[m - 1]) throw Error(ErrorKind::invalid_input, "r_m must be strictly increasing");
  std::vector<Matrix<S>> blocks;
  for (std::size_t k = 1; k <= count; ++k) blocks.emplace_back(k);
  S scale(1);
  for (std::size_t m = 1; m <= r_seq.size(); ++m) {
    scale /= S(2);
    const std::size_t r = r_seq[m - 1];
    if (r == 0 || r > count) throw Error(ErrorKind::invalid_input, "r_m = " + std::to_string(r) + " outside schedule");
    blocks[r - 1] = scale * lemma2_family(r);
  }
  return MatrixSchedule<S>(std::move(blocks));
}

/// The sigma-normalized, permutation-conjugated candidate M_n.
template <Scalar S>
std::function<Matrix<S>(std::size_t)> lemma2_family(std::string_view candidate) {
  auto family = candidate_family<S>(candidate);
  return [family](std::size_t n) { return lemma2_matrix(normalize_sigma(family(n), SweepMode::exact).matrix); };
}

/// U_l = sum_{k <= l} sum_{i,j in block k} R_k(i,j) e_{phi(i,l)} (x) e_{phi(j,l)}.
template <Scalar S>
TensorElement<S> build_U(const Scaffold& sc, const MatrixSchedule<S>& sched, std::size_t l) {
  if (l == 0 || l > sc.k_max || l > sched.count())
    throw Error(ErrorKind::invalid_index, "U_" + std::to_string(l) + " needs 1 <= l <= min(k_max, schedule length)");
  TensorElement<S> u;
  for (std::size_t k = 1; k <= l; ++k) {
    const Matrix<S>& r = sched.block(k);
    const std::size_t base = triangular(k - 1);
    std::vector<Node> nodes;
    for (std::size_t t = 1; t <= k; ++t) nodes.push_back(node_on_branch_at(sc, base + t, l));
    for (std::size_t a = 1; a <= k; ++a)
      for (std::size_t b = 1; b <= k; ++b) u.add(nodes[a - 1], nodes[b - 1], r(a, b));
  }
  return u;
}

inline std::vector<std::size_t> default_cut_points(std::size_t count) {
  std::vector<std::size_t> cuts(count);
  for (std::size_t r = 1; r <= count; ++r) cuts[r - 1] = r;
  return cuts;
}

/// V_r = sum_{l_{r-1} < l <= l_r} a_l U_l with l_0 = 0 and each block of
/// weights a convex combination.
template <Scalar S>
class ConvexBlocking {
 public:
  ConvexBlocking(std::vector<std::size_t> cut_points, std::vector<std::vector<S>> weights)
      : cuts_(std::move(cut_points)), weights_(std::move(weights)) {
    if (cuts_.size() != weights_.size())
      throw Error(ErrorKind::invalid_blocking, "one weight block is needed per cut point");
    std::size_t prev = 0;
    for (std::size_t r = 1; r <= cuts_.size(); ++r) {
      if (cuts_[r - 1] <= prev) throw Error(ErrorKind::invalid_blocking, "cut points must be strictly increasing from 1");
      const auto& w = weights_[r - 1];
      if (w.size() != cuts_[r - 1] - prev)
        throw Error(ErrorKind::invalid_blocking, "block " + std::to_string(r) + " needs " +
                                                     std::to_string(cuts_[r - 1] - prev) + " weights");
      S sum(0);
      for (const S& a : w) {
        if (a < S(0)) throw Error(ErrorKind::invalid_blocking, "convex weights must be nonnegative");
        sum += a;
      }
      if constexpr (scalar_traits<S>::exact) {
        if (sum != S(1)) throw Error(ErrorKind::invalid_blocking, "weights of block " + std::to_string(r) + " do not sum to 1");
      } else {
        if (abs_value(S(sum - S(1))) > S(1e-12))
          throw Error(ErrorKind::invalid_blocking, "weights of block " + std::to_string(r) + " do not sum to 1");
      }
      prev = cuts_[r - 1];
    }
  }

  static ConvexBlocking uniform(std::vector<std::size_t> cut_points) {
    std::vector<std::vector<S>> w;
    std::size_t prev = 0;
    for (std::size_t c : cut_points) {
      const std::size_t width = c > prev ? c - prev : 0;
      w.emplace_back(width, width ? S(S(1) / S(static_cast<long long>(width))) : S(0));
      prev = c;
    }
    return ConvexBlocking(std::move(cut_points), std::move(w));
  }

  /// All weight on the last index of each block: V_r = U_{l_r}.
  static ConvexBlocking vertex(std::vector<std::size_t> cut_points) {
    std::vector<std::vector<S>> w;
    std::size_t prev = 0;
    for (std::size_t c : cut_points) {
      std::vector<S> block(c > prev ? c - prev : 0, S(0));
      if (!block.empty()) block.back() = S(1);
      w.push_back(std::move(block));
      prev = c;
    }
    return ConvexBlocking(std::move(cut_points), std::move(w));
  }

  std::size_t blocks() const noexcept { return cuts_.size(); }

  /// l_r, with l_0 = 0.
  std::size_t cut(std::size_t r) const {
    if (r == 0) return 0;
    if (r > cuts_.size()) throw Error(ErrorKind::invalid_blocking, "blocking has no cut " + std::to_string(r));
    return cuts_[r - 1];
  }

  const std::vector<S>& weights(std::size_t r) const {
    if (r == 0 || r > weights_.size()) throw Error(ErrorKind::invalid_blocking, "blocking has no block " + std::to_string(r));
    return weights_[r - 1];
  }

  const std::vector<std::size_t>& cut_points() const noexcept { return cuts_; }

 private:
  std::vector<std::size_t> cuts_;
  std::vector<std::vector<S>> weights_;
};

template <Scalar S>
TensorElement<S> build_V(const Scaffold& sc, const MatrixSchedule<S>& sched, const ConvexBlocking<S>& blocking,
                         std::size_t q) {
  TensorElement<S> v;
  const std::size_t first = blocking.cut(q - 1) + 1;
  const auto& w = blocking.weights(q);
  for (std::size_t t = 0; t < w.size(); ++t)
    if (w[t] != S(0)) v += w[t] * build_U(sc, sched, first + t);
  return v;
}

/// `corrupted` is a negative control: xi_i follows gamma_i instead of
/// leaving it, so the pairing identity must fail.
enum class XiRule { standard, corrupted };

namespace detail {

template <Scalar S>
void require_materializable(const Scaffold& sc, const MatrixSchedule<S>* sched, const ConvexBlocking<S>& blocking,
                            std::size_t r) {
  if (r == 0) throw Error(ErrorKind::invalid_index, "block index r starts at 1");
  const std::size_t needed = 2 * r + 1;
  if (blocking.blocks() < needed)
    throw Error(ErrorKind::invalid_blocking, "r = " + std::to_string(r) + " needs " + std::to_string(needed) +
                                                 " convex blocks, blocking has " + std::to_string(blocking.blocks()));
  const std::size_t top = blocking.cut(needed);
  if (top > sc.k_max)
    throw Error(ErrorKind::invalid_blocking, "r = " + std::to_string(r) + " reaches U_" + std::to_string(top) +
                                                 " beyond k_max = " + std::to_string(sc.k_max));
  if (sched && top > sched->count())
    throw Error(ErrorKind::invalid_blocking, "r = " + std::to_string(r) + " reaches R_" + std::to_string(top) +
                                                 " beyond the schedule");
}

}  // namespace detail

/// xi_i for s_{r-1} < i <= s_r: follows gamma_i down to phi(i, l_{r+i-s_{r-1}}),
/// then takes bit 1 and continues with zeros.  Since gamma_i continues with
/// zeros, that node is the longest one xi_i shares with gamma_i.
template <Scalar S>
std::vector<Branch> build_xi(const Scaffold& sc, const ConvexBlocking<S>& blocking, std::size_t r,
                             XiRule rule = XiRule::standard) {
  detail::require_materializable<S>(sc, nullptr, blocking, r);
  std::vector<Branch> xi;
  const std::size_t base = triangular(r - 1);
  for (std::size_t t = 1; t <= r; ++t) {
    const Node shared = node_on_branch_at(sc, base + t, blocking.cut(r + t));
    const Node turn = shared.child(rule == XiRule::standard ? 1 : 0);
    xi.push_back(Branch::zeros_after(turn, sc.universe_depth));
  }
  return xi;
}

template <Scalar S>
struct PairingResult {
  std::size_t r = 0;
  Matrix<S> pairing;
  Matrix<S> predicted;
  S lower_bound;  // sigma(pairing)
  bool match = false;
  TensorElement<S> w;  // the alternating sum W_r
};

/// [(-1)^{min(i,j)+1} R_r(i,j)] in local indices, i.e. E(R_r).
template <Scalar S>
Matrix<S> predicted_pairing(const MatrixSchedule<S>& sched, std::size_t r) {
  return transform_E(sched.block(r));
}

/// W_r = sum_{t=1..r} (-1)^{t+1} (V_{r+t} - V_{r+t+1}), paired against the xi
/// branches of block r.  A mismatch with E(R_r) is reported through `match`,
/// not thrown, so reports can carry it.
template <Scalar S>
PairingResult<S> alternating_sum_pairing(const Scaffold& sc, const MatrixSchedule<S>& sched,
                                         const ConvexBlocking<S>& blocking, std::size_t r,
                                         XiRule rule = XiRule::standard) {
  detail::require_materializable(sc, &sched, blocking, r);
  std::vector<TensorElement<S>> v;  // v[t] = V_{r+t}, t = 1..r+1
  v.emplace_back();
  for (std::size_t t = 1; t <= r + 1; ++t) v.push_back(build_V(sc, sched, blocking, r + t));

  TensorElement<S> w;
  for (std::size_t t = 1; t <= r; ++t) {
    TensorElement<S> diff = v[t] - v[t + 1];
    if (t % 2 == 1)
      w += diff;
    else
      w -= diff;
  }

  std::vector<Functional> xi;
  for (Branch& b : build_xi(sc, blocking, r, rule)) xi.push_back(Functional::branch(std::move(b)));

  PairingResult<S> out{r, pairing_matrix(w, std::span<const Functional>(xi), std::span<const Functional>(xi)),
                       predicted_pairing(sched, r), S(0), false, std::move(w)};
  out.lower_bound = sigma_exact(out.pairing);
  out.match = out.pairing == out.predicted;
  return out;
}

/// Throws construction-bug when the pairing identity fails.
template <Scalar S>
const PairingResult<S>& require_pairing_identity(const PairingResult<S>& result) {
  if (!result.match)
    throw Error(ErrorKind::construction_bug, "alternating-sum pairing for r = " + std::to_string(result.r) +
                                                 " differs from E(R_r)");
  return result;
}

template <Scalar S>
struct DivergenceRow {
  std::size_t r = 0;
  S lower_bound;    // L_r = sigma(pairing)
  S sigma_E_direct; // sigma(E(R_r)) straight from the schedule
  Matrix<S> pairing;
  Matrix<S> predicted;
  bool match = false;
  S running_max;
  bool flagged = false;  // L_r > K_hypothesis
};

template <Scalar S>
struct DivergenceReport {
  std::vector<DivergenceRow<S>> rows;
  std::optional<S> k_hypothesis;

  bool all_match() const {
    return std::all_of(rows.begin(), rows.end(), [](const auto& row) { return row.match; });
  }
  bool any_flagged() const {
    return std::any_of(rows.begin(), rows.end(), [](const auto& row) { return row.flagged; });
  }
};

inline constexpr std::string_view kDivergenceNote =
    "L_r = sigma(E(R_r)) is a certified lower bound on the norm of the r-th alternating sum of convex-block "
    "differences; a wuC series would bound every L_r by one constant K. With R_{r_m} = M_{r_m}/2^m, "
    "L_{r_m} >= C log(r_m)/2^m, which only exceeds a given K once r_m is far beyond materializable sizes; "
    "the growth command measures the log n growth of sigma(E(M_n)) that drives it.";

template <Scalar S>
DivergenceReport<S> divergence_report(const Scaffold& sc, const MatrixSchedule<S>& sched,
                                      const ConvexBlocking<S>& blocking, std::span<const std::size_t> r_list,
                                      std::optional<S> k_hypothesis = std::nullopt, XiRule rule = XiRule::standard) {
  DivergenceReport<S> report;
  report.k_hypothesis = k_hypothesis;
  S running(0);
  for (std::size_t r : r_list) {
    PairingResult<S> p = alternating_sum_pairing(sc, sched, blocking, r, rule);
    if (running < p.lower_bound) running = p.lower_bound;
    DivergenceRow<S> row{r,
                         p.lower_bound,
                         sigma_exact(transform_E(sched.block(r))),
                         std::move(p.pairing),
                         std::move(p.predicted),
                         p.match,
                         running,
                         k_hypothesis.has_value() && *k_hypothesis < p.lower_bound};
    report.rows.push_back(std::move(row));
  }
  return report;
}

struct CaseResult {
  std::string name;
  bool passed = true;
  std::size_t checks = 0;
  std::string witness;
};

struct WeakCauchyReport {
  std::vector<CaseResult> cases;
  bool passed() const {
    return std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.passed; });
  }
};

namespace detail {

inline std::size_t shared_length(const Branch& a, const Branch& b) {
  const std::size_t limit = std::min(a.depth(), b.depth());
  std::size_t len = 0;
  while (len < limit && a.leaf().str()[len] == b.leaf().str()[len]) ++len;
  return len;
}

inline void record_failure(CaseResult& c, const std::string& what) {
  if (c.passed) c.witness = what;
  c.passed = false;
}

}  // namespace detail

/// Finite check of the case analysis showing (U_l x') is weakly Cauchy for
/// x' a node or branch functional:
///   node phi:               U_l phi = 0 once n_l > |phi|
///   branch missing all psi: U_l gamma = 0 for every l
///   branch through psi_k0, not any gamma_i:  U_l gamma = 0 once n_l exceeds
///                           the longest prefix it shares with a gamma_i
///   gamma_i0:               U_l gamma_i0 = sum_j R_k0(i0, j) e_{phi(j,l)}, l >= k0
template <Scalar S>
WeakCauchyReport weak_cauchy_evidence(const Scaffold& sc, const MatrixSchedule<S>& sched, std::size_t probe_depth) {
  if (probe_depth > sc.universe_depth)
    throw Error(ErrorKind::invalid_level, "probe depth exceeds the scaffold's universe depth");
  const std::size_t last = std::min(sc.k_max, sched.count());
  std::vector<TensorElement<S>> u(last + 1);
  for (std::size_t l = 1; l <= last; ++l) u[l] = build_U(sc, sched, l);
  const std::size_t depth = sc.universe_depth;

  WeakCauchyReport report;

  CaseResult nodes{"node functionals vanish past n_l > |phi|"};
  for (std::size_t len = 0; len <= probe_depth; ++len) {
    std::size_t threshold = 1;
    while (threshold <= last && sc.n(threshold) <= len) ++threshold;
    for (const Node& phi : descendants_at_level(Node::root(), len)) {
      for (std::size_t l = threshold; l <= last; ++l) {
        ++nodes.checks;
        if (!apply_left(u[l], Functional::node(phi)).is_zero())
          detail::record_failure(nodes, "U_" + std::to_string(l) + " '" + phi.str() + "' != 0");
      }
    }
  }
  if (nodes.passed) nodes.witness = "root vanishes from l = 1; nodes checked to depth " + std::to_string(probe_depth);
  report.cases.push_back(std::move(nodes));

  CaseResult misses{"branches through no psi_k vanish for all l"};
  for (const Branch& b : {Branch(std::string(depth, '1')), Branch::zeros_after(Node(std::string(sc.k_max, '1')), depth)}) {
    for (std::size_t k = 1; k <= sc.k_max; ++k)
      if (b.contains(sc.psi_node(k))) detail::record_failure(misses, "representative passes through psi_" + std::to_string(k));
    for (std::size_t l = 1; l <= last; ++l) {
      ++misses.checks;
      if (!apply_left(u[l], Functional::branch(b)).is_zero())
        detail::record_failure(misses, "U_" + std::to_string(l) + " on branch " + b.leaf().str() + " != 0");
    }
  }
  if (misses.passed) misses.witness = "all-ones branch and 1^{k_max}0... vanish for l = 1.." + std::to_string(last);
  report.cases.push_back(std::move(misses));

  CaseResult off{"branches through psi_k0 but no gamma_i vanish eventually"};
  std::size_t vacuous = 0;
  for (std::size_t k0 = 1; k0 <= sc.k_max; ++k0) {
    std::vector<Branch> reps;
    reps.push_back(Branch(sc.psi_node(k0).extended(std::string(depth - sc.psi_node(k0).length(), '1'))));
    for (std::size_t i = triangular(k0 - 1) + 1; i <= triangular(k0); ++i)
      reps.push_back(Branch::zeros_after(sc.phi_node(i).child(1), depth));
    for (const Branch& b : reps) {
      std::size_t longest = 0;
      for (std::size_t i = triangular(k0 - 1) + 1; i <= triangular(k0); ++i) {
        if (b == sc.gamma_branch(i)) detail::record_failure(off, "representative equals gamma_" + std::to_string(i));
        longest = std::max(longest, detail::shared_length(b, sc.gamma_branch(i)));
      }
      if (!b.contains(sc.psi_node(k0))) detail::record_failure(off, "representative misses psi_" + std::to_string(k0));
      std::size_t threshold = k0;
      while (threshold <= last && sc.n(threshold) <= longest) ++threshold;
      if (threshold > last) ++vacuous;
      for (std::size_t l = threshold; l <= last; ++l) {
        ++off.checks;
        if (!apply_left(u[l], Functional::branch(b)).is_zero())
          detail::record_failure(off, "U_" + std::to_string(l) + " on branch " + b.leaf().str() + " != 0");
      }
    }
  }
  if (off.passed)
    off.witness = std::to_string(off.checks) + " checks past explicit thresholds; " + std::to_string(vacuous) +
                  " representatives have thresholds beyond k_max";
  report.cases.push_back(std::move(off));

  CaseResult own{"gamma_i0 maps to the R_k0 row combination for l >= k0"};
  for (std::size_t i0 = 1; i0 <= triangular(last); ++i0) {
    const std::size_t k0 = block_of(i0);
    const std::size_t base = triangular(k0 - 1);
    for (std::size_t l = k0; l <= last; ++l) {
      TreeVector<S> expected;
      for (std::size_t j = base + 1; j <= triangular(k0); ++j)
        expected.add(node_on_branch_at(sc, j, l), sched.block(k0)(i0 - base, j - base));
      ++own.checks;
      if (apply_left(u[l], Functional::branch(sc.gamma_branch(i0))) != expected)
        detail::record_failure(own, "U_" + std::to_string(l) + " gamma_" + std::to_string(i0) + " differs");
    }
  }
  if (own.passed) own.witness = "exact for every i0 <= s_" + std::to_string(last) + " and l = k0.." + std::to_string(last);
  report.cases.push_back(std::move(own));
  return report;
}

enum class WucMode { exact_signs, sampled };

template <Scalar S>
struct WucEstimate {
  S lower{};                // max over visited signs/prefixes of the norm (or its lower bound)
  std::optional<S> upper;   // only for exhaustive sign enumeration
  bool exhaustive = false;
};

namespace detail {

template <Scalar S, class Element, class Bounds>
WucEstimate<S> wuc_estimate(std::span<const Element> series, WucMode mode, std::size_t samples, std::uint64_t seed,
                            Bounds bounds) {
  WucEstimate<S> out;
  out.exhaustive = mode == WucMode::exact_signs;
  S lo(0), hi(0);
  auto visit = [&](const Element& partial) {
    auto [l, h] = bounds(partial);
    if (lo < l) lo = l;
    if (hi < h) hi = h;
  };
  if (mode == WucMode::exact_signs) {
    if (series.size() > 20) throw Error(ErrorKind::invalid_input, "exhaustive sign enumeration is limited to 20 terms");
    // The norm is even, so the first sign is fixed to +1.
    auto dfs = [&](auto&& self, std::size_t k, const Element& partial) -> void {
      if (k == series.size()) return;
      for (int sign : {1, -1}) {
        if (k == 0 && sign < 0) continue;
        Element next = partial;
        if (sign > 0)
          next += series[k];
        else
          next -= series[k];
        visit(next);
        self(self, k + 1, next);
      }
    };
    dfs(dfs, 0, Element{});
    out.upper = hi;
  } else {
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
      Element partial{};
      for (std::size_t k = 0; k < series.size(); ++k) {
        if (rng() >> 63)
          partial -= series[k];
        else
          partial += series[k];
        visit(partial);
      }
    }
  }
  out.lower = lo;
  return out;
}

}  // namespace detail

/// K = max over signs and prefixes of || sum_{n<=k} eps_n x_n ||.
template <Scalar S>
WucEstimate<S> wuc_constant(std::span<const TreeVector<S>> series, WucMode mode, std::size_t samples = 256,
                            std::uint64_t seed = 1) {
  return detail::wuc_estimate<S>(series, mode, samples, seed,
                                 [](const TreeVector<S>& x) {
                                   S v = jh_norm(x);
                                   return std::pair<S, S>{v, v};
                                 });
}

/// Tensor version: `lower` uses eps_norm_bounds().lo and `upper` its .hi.
template <Scalar S>
WucEstimate<S> wuc_constant(std::span<const TensorElement<S>> series, WucMode mode, std::size_t samples = 256,
                            std::uint64_t seed = 1, const EpsBoundOptions& opt = {}) {
  return detail::wuc_estimate<S>(series, mode, samples, seed,
                                 [&opt](const TensorElement<S>& w) {
                                   auto b = eps_norm_bounds(w, opt);
                                   return std::pair<S, S>{b.lo, b.hi};
                                 });
}

}  // namespace jhlab
