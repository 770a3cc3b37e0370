#include "solitonkit/rep_weights.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "solitonkit/errors.hpp"

namespace solitonkit::rep {

namespace {

void check_rank(int n, const char* who) {
  if (n < kMinRank || n > kMaxRank)
    throw PreconditionError(std::string(who) + ": n must lie in [" + std::to_string(kMinRank) + ", " +
                            std::to_string(kMaxRank) + "], got " + std::to_string(n));
}

// Weight of the SU(n+1) torus given by lambda in Z^{n+1}.
Weight from_lambda(const std::vector<int>& lambda) {
  Weight w;
  w.u.resize(lambda.size() - 1);
  for (std::size_t i = 1; i < lambda.size(); ++i) w.u[i - 1] = lambda[i] - lambda[0];
  return w;
}

std::vector<int> unit(int n, int i, int sign = 1) {
  std::vector<int> v(n + 1, 0);
  v[i] = sign;
  return v;
}

std::vector<int> add(std::vector<int> a, const std::vector<int>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

long long dot(const std::vector<int>& a, const std::vector<int>& b) {
  long long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long long>(a[i]) * b[i];
  return s;
}

// nu (sorted descending) lies in the weight polytope of V(lambda) iff it is majorized by lambda.
bool majorized(const std::vector<int>& nu, const std::vector<int>& lambda) {
  long long a = 0, b = 0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    a += nu[i];
    b += lambda[i];
    if (a > b) return false;
  }
  return a == b;
}

void enumerate_dominant(const std::vector<int>& lambda, std::size_t pos, int upper, long long remaining,
                        std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  const int n = static_cast<int>(lambda.size());
  const int lo = lambda.back();
  if (pos == lambda.size()) {
    if (remaining == 0 && majorized(cur, lambda)) out.push_back(cur);
    return;
  }
  const int slots = n - static_cast<int>(pos);
  for (int v = upper; v >= lo; --v) {
    // Remaining entries lie in [lo, v].
    const long long rest = remaining - v;
    if (rest < static_cast<long long>(slots - 1) * lo) continue;
    if (rest > static_cast<long long>(slots - 1) * v) break;
    cur[pos] = v;
    enumerate_dominant(lambda, pos + 1, v, rest, cur, out);
  }
}

long long height(const std::vector<int>& u) {
  const int n = static_cast<int>(u.size());
  long long h = 0;
  for (int i = 0; i < n; ++i) h += static_cast<long long>(n - 1 - i) * u[i];
  return h;
}

}  // namespace

int Weight::charge() const { return -std::accumulate(u.begin(), u.end(), 0); }

bool Weight::dominant() const { return std::is_sorted(u.begin(), u.end(), std::greater<>()); }

std::string to_string(const Weight& w) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < w.u.size(); ++i) os << (i ? "," : "") << w.u[i];
  os << ")";
  return os.str();
}

long long KModule::dimension() const {
  long long d = 0;
  for (const auto& [w, m] : weights) d += m;
  return d;
}

long long KModule::multiplicity(const Weight& w) const {
  const auto it = weights.find(w);
  return it == weights.end() ? 0 : it->second;
}

void KModule::add(const Weight& w, long long mult) {
  if (static_cast<int>(w.u.size()) != n) throw PreconditionError("KModule::add: weight has wrong rank");
  auto& m = weights[w];
  m += mult;
  if (m == 0) weights.erase(w);
}

bool KModule::weyl_symmetric() const {
  for (const auto& [w, m] : weights) {
    Weight p = w;
    std::sort(p.u.begin(), p.u.end());
    do {
      if (multiplicity(p) != m) return false;
    } while (std::next_permutation(p.u.begin(), p.u.end()));
  }
  return true;
}

KModule adjoint_module(int n) {
  check_rank(n, "adjoint_module");
  KModule m{"sl(" + std::to_string(n + 1) + ")", n, {}};
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      if (i != j) m.add(from_lambda(add(unit(n, i), unit(n, j, -1))));
  m.add(Weight{std::vector<int>(n, 0)}, n);
  return m;
}

KModule isotropy_module(int n) {
  check_rank(n, "isotropy_module");
  KModule m{"m", n, {}};
  for (int j = 1; j <= n; ++j) {
    m.add(from_lambda(add(unit(n, 0), unit(n, j, -1))));
    m.add(from_lambda(add(unit(n, j), unit(n, 0, -1))));
  }
  return m;
}

KModule sym2_dual_isotropy(int n) {
  check_rank(n, "sym2_dual_isotropy");
  std::vector<Weight> dual;
  for (const auto& [w, mult] : isotropy_module(n).weights) {
    Weight d = w;
    for (int& x : d.u) x = -x;
    for (long long k = 0; k < mult; ++k) dual.push_back(d);
  }
  KModule m{"S2(m*)", n, {}};
  for (std::size_t a = 0; a < dual.size(); ++a)
    for (std::size_t b = a; b < dual.size(); ++b) {
      Weight s = dual[a];
      for (int i = 0; i < n; ++i) s.u[i] += dual[b].u[i];
      m.add(s);
    }
  return m;
}

long long weyl_dimension(const Weight& highest) {
  const auto& l = highest.u;
  const int n = static_cast<int>(l.size());
  // prod_{i<j} (l_i - l_j + j - i) / (j - i), accumulated as an exact fraction.
  long double num = 1.0L, den = 1.0L;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      num *= static_cast<long double>(l[i] - l[j] + j - i);
      den *= static_cast<long double>(j - i);
    }
  return static_cast<long long>(num / den + 0.5L);
}

KModule irreducible(int n, const Weight& highest) {
  if (static_cast<int>(highest.u.size()) != n || !highest.dominant())
    throw PreconditionError("irreducible: highest weight must be dominant of rank n");
  const auto& lam = highest.u;
  std::vector<int> rho(n);
  for (int i = 0; i < n; ++i) rho[i] = n - 1 - i;

  std::vector<std::vector<int>> dom;
  std::vector<int> cur(n);
  const long long total = std::accumulate(lam.begin(), lam.end(), 0LL);
  enumerate_dominant(lam, 0, lam.front(), total, cur, dom);
  std::sort(dom.begin(), dom.end(), [](const auto& a, const auto& b) { return height(a) > height(b); });

  std::map<std::vector<int>, long long> mult;
  const auto lookup = [&](std::vector<int> v) -> long long {
    std::sort(v.begin(), v.end(), std::greater<>());
    const auto it = mult.find(v);
    return it == mult.end() ? 0 : it->second;
  };
  const auto shifted_norm = [&](const std::vector<int>& v) {
    std::vector<int> s = v;
    for (int i = 0; i < n; ++i) s[i] += rho[i];
    return dot(s, s);
  };
  const long long top = shifted_norm(lam);
  for (const auto& mu : dom) {
    if (mu == lam) {
      mult[mu] = 1;
      continue;
    }
    long long sum = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        std::vector<int> nu = mu;
        for (;;) {
          nu[i] += 1;
          nu[j] -= 1;
          std::vector<int> s = nu;
          std::sort(s.begin(), s.end(), std::greater<>());
          if (!majorized(s, lam)) break;
          sum += lookup(nu) * (nu[i] - nu[j]);
        }
      }
    const long long den = top - shifted_norm(mu);
    if (den <= 0 || (2 * sum) % den != 0) throw IntegrityError("irreducible: Freudenthal recursion is inconsistent");
    mult[mu] = 2 * sum / den;
  }

  KModule m{"V" + to_string(highest), n, {}};
  for (const auto& [mu, k] : mult) {
    if (k == 0) continue;
    std::vector<int> p = mu;
    std::sort(p.begin(), p.end());
    do {
      m.add(Weight{p}, k);
    } while (std::next_permutation(p.begin(), p.end()));
  }
  return m;
}

std::vector<Summand> k_decompose(const KModule& module) {
  if (!module.weyl_symmetric()) throw PreconditionError("k_decompose: " + module.name + " is not Weyl-symmetric");
  KModule rest = module;
  std::vector<Summand> out;
  while (!rest.weights.empty()) {
    auto best = rest.weights.begin();
    for (auto it = rest.weights.begin(); it != rest.weights.end(); ++it)
      if (height(it->first.u) > height(best->first.u)) best = it;
    const Weight hw = best->first;
    const long long k = best->second;
    if (k < 0 || !hw.dominant()) throw IntegrityError("k_decompose: " + module.name + " is not a genuine K-module");
    const KModule irr = irreducible(module.n, hw);
    for (const auto& [w, m] : irr.weights) {
      rest.add(w, -k * m);
      if (rest.multiplicity(w) < 0)
        throw IntegrityError("k_decompose: multiplicity of " + to_string(w) + " in " + module.name + " went negative");
    }
    out.push_back({hw, k, irr.dimension()});
  }
  std::sort(out.begin(), out.end(), [](const Summand& a, const Summand& b) { return a.highest > b.highest; });
  return out;
}

long long hom_multiplicity(const KModule& a, const KModule& b) {
  if (a.n != b.n) throw PreconditionError("hom_multiplicity: modules of different rank");
  const auto da = k_decompose(a), db = k_decompose(b);
  long long s = 0;
  for (const auto& x : da)
    for (const auto& y : db)
      if (x.highest == y.highest) s += x.multiplicity * y.multiplicity;
  return s;
}

CpnDeformationCount dim_Z_cpn(int n) {
  if (n < kMinRank) throw PreconditionError("dim_Z_cpn: n must be >= 2");
  CpnDeformationCount c;
  c.n = n;
  c.dim_Z = static_cast<long long>(n + 1) * (n + 1) - 1;
  c.dim_F = c.dim_Z;
  c.dim_ker_T = 2 * c.dim_Z;
  c.dim_im_psi1 = c.dim_Z;
  c.dim_im_psi2 = c.dim_Z;
  if (n <= kMaxRank) {
    const KModule g = adjoint_module(n), s2 = sym2_dual_isotropy(n);
    c.adjoint_decomposition = k_decompose(g);
    c.sym2_decomposition = k_decompose(s2);
    c.hom_multiplicity = hom_multiplicity(g, s2);
  }
  return c;
}

}  // namespace solitonkit::rep
