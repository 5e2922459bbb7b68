#include "folint/invariants.hpp"

#include <cctype>
#include <cmath>

namespace folint {

double tau(const SquareMatrix<double>& A, int k) {
  if (k < 0) throw InputError("power sum index must be non-negative");
  return power_sums(A, k)[static_cast<std::size_t>(k)];
}

double sigma(const SquareMatrix<double>& A, int r) {
  if (r < 0 || r > A.size()) throw InputError("sigma index out of range 0..n");
  return elementary_from_power_sums(power_sums(A, r), r)[static_cast<std::size_t>(r)];
}

std::vector<double> sigmas(const SquareMatrix<double>& A) {
  return elementary_from_power_sums(power_sums(A, A.size()), A.size());
}

SquareMatrix<double> newton_transform(const SquareMatrix<double>& A, int r) {
  if (r < 0 || r > A.size()) throw InputError("Newton transformation index out of range 0..n");
  const auto s = sigmas(A);
  const auto rec = newton_recursive(A, s, r);
  const auto expl = newton_explicit(matrix_powers(A, r), s, r);
  if (max_abs_difference(rec, expl) > 1e-8)
    throw ConsistencyError("recursive and explicit Newton transformations disagree");
  return rec;
}

CoefficientRecipe CoefficientRecipe::newton(int r, int n) {
  if (n < 1) throw InputError("recipe arity must be positive");
  if (r < 0 || r > n) throw InputError("newton(r) needs 0 <= r <= n");
  CoefficientRecipe c;
  c.n_ = n;
  c.newton_r_ = r;
  return c;
}

CoefficientRecipe CoefficientRecipe::from_expressions(std::vector<Expression> f) {
  if (f.empty()) throw InputError("recipe needs at least one coefficient");
  const int n = static_cast<int>(f.size());
  for (const auto& e : f) {
    if (e.max_coordinate() >= 0) throw InputError("recipe coefficients may not use chart coordinates");
    for (const auto& name : e.parameter_names()) {
      bool ok = name.size() >= 2 && name[0] == 't';
      int idx = 0;
      for (std::size_t i = 1; ok && i < name.size(); ++i) {
        ok = std::isdigit(static_cast<unsigned char>(name[i])) != 0;
        idx = idx * 10 + (name[i] - '0');
      }
      if (!ok || idx < 1 || idx > n) throw InputError("recipe variable '" + name + "' is not one of t1..t" + std::to_string(n));
    }
  }
  CoefficientRecipe c;
  c.n_ = n;
  c.f_ = std::move(f);
  return c;
}

CoefficientRecipe CoefficientRecipe::parse(std::string_view spec, int n) {
  std::string s(spec);
  std::string compact;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) compact += ch;
  if (compact.rfind("newton(", 0) == 0 && compact.back() == ')') {
    const std::string num = compact.substr(7, compact.size() - 8);
    if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos)
      throw InputError("newton(r) needs a non-negative integer r");
    return newton(std::stoi(num), n);
  }
  std::vector<Expression> f;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(';', start);
    f.push_back(Expression::parse(std::string_view(s).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (static_cast<int>(f.size()) != n)
    throw InputError("recipe needs exactly n = " + std::to_string(n) + " coefficients, got " + std::to_string(f.size()));
  return from_expressions(std::move(f));
}

std::string CoefficientRecipe::to_string() const {
  if (is_newton()) return "newton(" + std::to_string(newton_r_) + ")";
  std::string s;
  for (std::size_t k = 0; k < f_.size(); ++k) {
    if (k) s += "; ";
    s += f_[k].to_string();
  }
  return s;
}

namespace {

template <class T>
std::vector<T> newton_coefficients(int r, int n, const std::vector<T>& tau) {
  const auto s = elementary_from_power_sums(tau, r);
  std::vector<T> f(static_cast<std::size_t>(n), T(0.0));
  for (int j = 0; j <= r && j < n; ++j) {
    const T& v = s[static_cast<std::size_t>(r - j)];
    f[static_cast<std::size_t>(j)] = j % 2 == 0 ? v : -v;
  }
  return f;
}

}  // namespace

std::vector<double> CoefficientRecipe::evaluate(const std::vector<double>& tau) const {
  if (static_cast<int>(tau.size()) <= n_) throw InputError("recipe needs tau_1..tau_n");
  if (is_newton()) return newton_coefficients(newton_r_, n_, tau);
  std::vector<double> f;
  std::vector<std::string> names;
  for (int j = 1; j <= n_; ++j) names.push_back("t" + std::to_string(j));
  const auto lookup = [&](std::string_view name) -> const double* {
    for (int j = 0; j < n_; ++j)
      if (names[static_cast<std::size_t>(j)] == name) return &tau[static_cast<std::size_t>(j + 1)];
    return nullptr;
  };
  for (const auto& e : f_) f.push_back(e.evaluate_generic<double>(std::span<const double>(), lookup, 0.0));
  return f;
}

std::vector<FrameJet> CoefficientRecipe::evaluate(const std::vector<FrameJet>& tau) const {
  if (static_cast<int>(tau.size()) <= n_) throw InputError("recipe needs tau_1..tau_n");
  if (is_newton()) return newton_coefficients(newton_r_, n_, tau);
  std::vector<Jet3> t;
  std::vector<double> tv;
  for (int j = 1; j <= n_; ++j) tv.push_back(tau[static_cast<std::size_t>(j)].v);
  for (int j = 0; j < n_; ++j) t.push_back(Jet3::variable(n_, j, tv).truncated(1));
  std::vector<std::string> names;
  for (int j = 1; j <= n_; ++j) names.push_back("t" + std::to_string(j));
  const auto lookup = [&](std::string_view name) -> const Jet3* {
    for (int j = 0; j < n_; ++j)
      if (names[static_cast<std::size_t>(j)] == name) return &t[static_cast<std::size_t>(j)];
    return nullptr;
  };
  std::vector<FrameJet> f;
  const Jet3 zero(n_, 0.0, 1);
  for (const auto& e : f_) {
    const Jet3 v = e.evaluate_generic<Jet3>(std::span<const Jet3>(), lookup, zero);
    FrameJet r(v.value());
    for (int j = 0; j < n_; ++j)
      for (int a = 0; a < FrameJet::kMaxDirections; ++a)
        r.d[static_cast<std::size_t>(a)] += v.grad(j) * tau[static_cast<std::size_t>(j + 1)].d[static_cast<std::size_t>(a)];
    f.push_back(r);
  }
  return f;
}

SquareMatrix<double> general_transform(const SquareMatrix<double>& A, const CoefficientRecipe& recipe) {
  if (recipe.arity() != A.size()) throw InputError("recipe arity does not match the operator size");
  const auto tau = power_sums(A, A.size());
  return operator_polynomial(matrix_powers(A, A.size() - 1), recipe.evaluate(tau));
}

}  // namespace folint
