#include "dch/basis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace dch {

namespace {

BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

double factorial_d(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

void partitions_into(int remaining, int max_part, std::vector<int>& current,
                     std::vector<YoungDiagram>& out) {
  if (remaining == 0) {
    out.push_back(YoungDiagram{current});
    return;
  }
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    current.push_back(p);
    partitions_into(remaining - p, p, current, out);
    current.pop_back();
  }
}

YoungDiagram with_part(const YoungDiagram& y, int part) {
  YoungDiagram out = y;
  const auto pos = std::upper_bound(out.parts.begin(), out.parts.end(), part, std::greater<int>());
  out.parts.insert(pos, part);
  return out;
}

BPolynomial from_table(int degree, const std::map<YoungDiagram, BigInt>& table) {
  BPolynomial p;
  p.degree = degree;
  for (auto it = table.rbegin(); it != table.rend(); ++it)
    if (it->second != 0) p.terms.emplace_back(it->first, it->second);
  return p;
}

}  // namespace

int YoungDiagram::degree() const {
  int d = 0;
  for (int p : parts) d += p;
  return d;
}

std::vector<std::pair<int, int>> YoungDiagram::groups() const {
  std::vector<std::pair<int, int>> out;
  for (int p : parts) {
    if (!out.empty() && out.back().first == p)
      ++out.back().second;
    else
      out.emplace_back(p, 1);
  }
  return out;
}

std::string to_string(const YoungDiagram& y) {
  std::string s = "(";
  for (std::size_t i = 0; i < y.parts.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(y.parts[i]);
  }
  return s + ")";
}

std::vector<YoungDiagram> partitions(int k) {
  if (k < 0) throw ValidationError("cannot partition a negative integer");
  std::vector<YoungDiagram> out;
  std::vector<int> current;
  partitions_into(k, k, current, out);
  return out;
}

BigInt young_coefficient(const YoungDiagram& y) {
  for (std::size_t i = 0; i < y.parts.size(); ++i)
    if (y.parts[i] < 1 || (i > 0 && y.parts[i] > y.parts[i - 1]))
      throw ValidationError("Young diagram parts must be positive and weakly decreasing");
  const int k = y.degree();
  const int l = y.length();
  BigInt num = factorial(k) * factorial(l);
  BigInt den = 1;
  for (const auto& [part, mult] : y.groups()) {
    const BigInt fk = factorial(part);
    for (int i = 0; i < mult; ++i) den *= fk;
    den *= factorial(mult);
  }
  BigInt c = num / den;
  return ((k + l) % 2 == 0) ? c : BigInt(-c);
}

BigInt BPolynomial::coefficient_sum() const {
  BigInt s = 0;
  for (const auto& [y, c] : terms) s += c;
  return s;
}

BPolynomial b_polynomial(int k) {
  BPolynomial p;
  p.degree = k;
  for (YoungDiagram& y : partitions(k)) {
    BigInt c = young_coefficient(y);
    p.terms.emplace_back(std::move(y), std::move(c));
  }
  return p;
}

std::vector<BPolynomial> b_polynomials_recursive(int max_k) {
  if (max_k < 0) throw ValidationError("degree must be >= 0");
  std::vector<std::map<YoungDiagram, BigInt>> tables(static_cast<std::size_t>(max_k) + 1);
  tables[0][YoungDiagram{}] = 1;
  for (int k = 1; k <= max_k; ++k) {
    auto& table = tables[k];
    for (int j = 0; j < k; ++j) {
      BigInt factor = binomial(k, j);
      if ((k + j + 1) % 2 != 0) factor = -factor;
      for (const auto& [y, c] : tables[j]) table[with_part(y, k - j)] += factor * c;
    }
  }
  std::vector<BPolynomial> out;
  for (int k = 0; k <= max_k; ++k) out.push_back(from_table(k, tables[k]));
  return out;
}

Complex evaluate_diagram(const YoungDiagram& y, std::span<const Complex> monomials_at_b) {
  Complex value{1.0, 0.0};
  for (int p : y.parts) {
    if (static_cast<std::size_t>(p) >= monomials_at_b.size())
      throw ValidationError("not enough monomial values to evaluate " + to_string(y));
    value *= monomials_at_b[p];
  }
  return value;
}

namespace {

std::vector<Complex> b_values(int max_k, std::span<const Complex> at_b) {
  std::vector<Complex> out;
  for (int j = 0; j <= max_k; ++j) {
    Complex s{};
    for (const auto& [y, c] : b_polynomial(j).terms)
      s += c.convert_to<double>() * evaluate_diagram(y, at_b);
    out.push_back(s);
  }
  return out;
}

std::vector<Complex> values_at(const std::vector<VertexFunction>& zs, VertexId b) {
  std::vector<Complex> out;
  for (const VertexFunction& z : zs) out.push_back(z[b]);
  return out;
}

}  // namespace

Complex evaluate_b(int k, const MapPtr& map, VertexId b) {
  if (b >= map->vertex_count()) throw ValidationError("unknown vertex " + std::to_string(b));
  const auto zs = monomials(map, k);
  const auto at_b = values_at(zs, b);
  return b_values(k, at_b).back();
}

VertexFunction translate_monomial(int k, Complex a, VertexId b, const MapPtr& map) {
  if (k < 0) throw ValidationError("degree must be >= 0");
  if (b >= map->vertex_count()) throw ValidationError("unknown vertex " + std::to_string(b));
  const auto zs = monomials(map, k);
  const auto bs = b_values(k, values_at(zs, b));
  VertexFunction out = VertexFunction::constant(map, 0.0);
  for (int j = 0; j <= k; ++j) {
    double c = binomial(k, j).convert_to<double>();
    if (j % 2) c = -c;
    out += (c * bs[j]) * zs[k - j];
  }
  out *= std::pow(a, k);
  return out;
}

MinimalPolynomial minimal_polynomial(const MapPtr& map, int max_degree) {
  if (map->quad_count() == 0) throw ValidationError("minimal polynomial needs at least one quad");
  const std::size_t bound = map->boundary_size() / 2 + 1;
  if (max_degree < static_cast<int>(bound))
    throw ValidationError("max degree " + std::to_string(max_degree) +
                          " is below the dimension bound " + std::to_string(bound));

  const auto zs = monomials(map, max_degree);
  const Eigen::Index rows = static_cast<Eigen::Index>(map->vertex_count());
  MinimalPolynomial result;

  for (int n = 1; n <= max_degree; ++n) {
    Eigen::MatrixXcd a(rows, n);
    std::vector<double> norms(n);
    for (int k = 1; k <= n; ++k) {
      const auto vals = zs[k].values();
      Eigen::Map<const Eigen::VectorXcd> col(vals.data(), rows);
      norms[k - 1] = col.norm();
      a.col(k - 1) = col / norms[k - 1];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double ratio = sv(n - 1) / sv(0);
    result.singular_ratio_trace.push_back(ratio);
    if (!(ratio < kDependenceThreshold)) continue;

    const Eigen::VectorXcd v = svd.matrixV().col(n - 1);
    std::vector<Complex> coeffs(n);
    for (int k = 0; k < n; ++k) coeffs[k] = v(k) / norms[k];
    const Complex a1 = coeffs[0];
    for (Complex& c : coeffs) c /= a1;

    result.n = n;
    result.a = coeffs;

    VertexFunction p = VertexFunction::constant(map, 0.0);
    double largest = 0.0;
    for (int k = 1; k <= n; ++k) {
      VertexFunction term = coeffs[k - 1] * zs[k];
      largest = std::max(largest, term.sup_norm());
      p += term;
    }
    result.residual = p.sup_norm() / largest;

    VertexFunction dp = VertexFunction::constant(map, 0.0);
    for (int k = 1; k <= n; ++k) dp += (static_cast<double>(k) * coeffs[k - 1]) * zs[k - 1];
    const VertexFunction eps = exp_infinity(map);
    result.normalization_residual = sup_distance(dp, eps) / eps.sup_norm();

    const double delta = map->delta();
    const double s = 4.0 / (delta * delta);
    const Complex an = coeffs[n - 1];
    double sym = 0.0;
    for (int k = 1; k <= n; ++k) {
      const Complex predicted = factorial_d(n + 1 - k) / (factorial_d(n) * factorial_d(k)) *
                                std::conj(coeffs[n - k]) / std::conj(an) * std::pow(s, k - 1);
      const double magnitude = std::pow(s, 0.5 * (k - 1)) / factorial_d(k);
      sym = std::max(sym, std::abs(coeffs[k - 1] - predicted) / magnitude);
    }
    result.symmetry_defect = sym;
    const double modulus = std::pow(s, 0.5 * (n - 1)) / factorial_d(n);
    result.modulus_defect = std::abs(std::abs(an) - modulus) / modulus;
    return result;
  }

  std::ostringstream msg;
  msg.precision(3);
  msg << "no polynomial dependence up to degree " << max_degree << "; sigma_min/sigma_max trace:";
  for (double r : result.singular_ratio_trace) msg << ' ' << r;
  throw NumericalError(msg.str(), result.singular_ratio_trace.empty() ? 0.0 : result.singular_ratio_trace.back());
}

}  // namespace dch
