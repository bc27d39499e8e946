#include "kgm/radial.hpp"

#include "kgm/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace kgm {

namespace {
// The FFTW planner is not reentrant; execution of an existing plan is.
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace

struct RadialGrid::Private {};

struct RadialGrid::Plan {
  fftw_plan plan = nullptr;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    if (plan)
      fftw_destroy_plan(plan);
  }
};

RadialGrid::RadialGrid(Private, double R, std::size_t N)
    : R_(R), N_(N), h_(R / static_cast<double>(N + 1)),
      nu_(2.0 * std::numbers::pi * R), nodes_(N), freqs_(N), weights_(N),
      plan_(std::make_unique<Plan>()) {
  const double pi = std::numbers::pi;
  for (std::size_t j = 0; j < N; ++j) {
    const double r = static_cast<double>(j + 1) * h_;
    nodes_[j] = r;
    freqs_[j] = static_cast<double>(j + 1) * pi / R;
    weights_[j] = 4.0 * pi * r * r * h_;
  }
  std::vector<double> in(N), out(N);
  std::lock_guard lock(planner_mutex());
  plan_->plan = fftw_plan_r2r_1d(static_cast<int>(N), in.data(), out.data(),
                                 FFTW_RODFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan_->plan)
    throw NumericalError("FFTW failed to create a DST-I plan");
}

RadialGrid::~RadialGrid() = default;

GridPtr make_grid(double R, std::size_t N) {
  if (!(R > 0.0) || !std::isfinite(R))
    throw DomainError("make_grid: radius must be positive");
  if (N < 8)
    throw DomainError("make_grid: need at least 8 modes");
  return std::make_shared<const RadialGrid>(RadialGrid::Private{}, R, N);
}

void RadialGrid::dst(std::span<const double> in, std::span<double> out) const {
  if (in.size() != N_ || out.size() != N_)
    throw DomainError("dst: size mismatch");
  // FFTW's RODFT00 carries a factor 2.
  fftw_execute_r2r(plan_->plan, const_cast<double *>(in.data()), out.data());
  for (double &x : out)
    x *= 0.5;
}

void RadialGrid::values_to_modes(std::span<const double> values,
                                 std::span<double> modes) const {
  if (values.size() != N_ || modes.size() != N_)
    throw DomainError("values_to_modes: size mismatch");
  std::vector<double> w(N_);
  for (std::size_t j = 0; j < N_; ++j)
    w[j] = nodes_[j] * values[j];
  dst(w, modes);
  const double scale = 2.0 / static_cast<double>(N_ + 1);
  for (double &c : modes)
    c *= scale;
}

void RadialGrid::modes_to_values(std::span<const double> modes,
                                 std::span<double> values) const {
  if (values.size() != N_ || modes.size() != N_)
    throw DomainError("modes_to_values: size mismatch");
  dst(modes, values);
  for (std::size_t j = 0; j < N_; ++j)
    values[j] /= nodes_[j];
}

RadialField::RadialField(GridPtr grid, Representation rep,
                         std::vector<double> data)
    : grid_(std::move(grid)), rep_(rep), data_(std::move(data)) {
  if (!grid_)
    throw DomainError("RadialField: null grid");
  if (data_.size() != grid_->N())
    throw DomainError("RadialField: data size does not match grid");
}

RadialField RadialField::zeros(GridPtr grid, Representation rep) {
  const std::size_t n = grid->N();
  return RadialField(std::move(grid), rep, std::vector<double>(n, 0.0));
}

RadialField RadialField::from_function(GridPtr grid,
                                       const std::function<double(double)> &f) {
  std::vector<double> v(grid->N());
  const auto r = grid->nodes();
  for (std::size_t j = 0; j < v.size(); ++j)
    v[j] = f(r[j]);
  return RadialField(std::move(grid), Representation::values, std::move(v));
}

RadialField RadialField::mode(GridPtr grid, std::size_t n) {
  if (n < 1 || n > grid->N())
    throw DomainError("RadialField::mode: index out of range");
  RadialField f = zeros(std::move(grid));
  f.data_[n - 1] = 1.0;
  return f;
}

std::vector<double> RadialField::values() const {
  if (rep_ == Representation::values)
    return data_;
  std::vector<double> v(data_.size());
  grid_->modes_to_values(data_, v);
  return v;
}

std::vector<double> RadialField::modes() const {
  if (rep_ == Representation::modes)
    return data_;
  std::vector<double> c(data_.size());
  grid_->values_to_modes(data_, c);
  return c;
}

RadialField RadialField::transform(Representation target) const {
  if (target == rep_)
    return *this;
  return RadialField(grid_, target,
                     target == Representation::modes ? modes() : values());
}

RadialField transform(const RadialField &field, Representation target) {
  return field.transform(target);
}

double RadialField::evaluate(double r) const {
  const std::vector<double> c = modes();
  const auto k = grid_->frequencies();
  double sum = 0.0;
  if (r == 0.0) {
    for (std::size_t n = 0; n < c.size(); ++n)
      sum += c[n] * k[n];
    return sum;
  }
  for (std::size_t n = 0; n < c.size(); ++n)
    sum += c[n] * std::sin(k[n] * r);
  return sum / r;
}

void require_same_grid(const RadialField &a, const RadialField &b) {
  if (a.grid() != b.grid() &&
      (a.grid()->N() != b.grid()->N() || a.grid()->R() != b.grid()->R()))
    throw DomainError("fields live on different grids");
}

RadialField &RadialField::operator+=(const RadialField &other) {
  require_same_grid(*this, other);
  const auto o = other.rep_ == rep_ ? other.data_
                 : rep_ == Representation::modes ? other.modes()
                                                 : other.values();
  for (std::size_t i = 0; i < data_.size(); ++i)
    data_[i] += o[i];
  return *this;
}

RadialField &RadialField::operator-=(const RadialField &other) {
  require_same_grid(*this, other);
  const auto o = other.rep_ == rep_ ? other.data_
                 : rep_ == Representation::modes ? other.modes()
                                                 : other.values();
  for (std::size_t i = 0; i < data_.size(); ++i)
    data_[i] -= o[i];
  return *this;
}

RadialField &RadialField::operator*=(double a) {
  for (double &x : data_)
    x *= a;
  return *this;
}

OperatorSymbol OperatorSymbol::make(GridPtr grid, double s, double alpha,
                                    double shift) {
  if (!(s > 0.0 && s < 1.0))
    throw DomainError("OperatorSymbol: s must lie in (0,1)");
  OperatorSymbol sym;
  sym.s = s;
  sym.alpha = alpha;
  sym.shift = shift;
  const auto k = grid->frequencies();
  sym.sigma.resize(k.size());
  for (std::size_t n = 0; n < k.size(); ++n) {
    const double k2 = k[n] * k[n];
    sym.sigma[n] = alpha == 0.0 ? k2 : k2 + alpha * std::pow(k2, s);
  }
  sym.grid = std::move(grid);
  return sym;
}

RadialField apply_operator(const RadialField &field,
                           const OperatorSymbol &symbol) {
  if (symbol.sigma.size() != field.grid()->N() ||
      (symbol.grid && symbol.grid->R() != field.grid()->R()))
    throw DomainError("apply_operator: symbol and field grids differ");
  std::vector<double> c = field.modes();
  for (std::size_t n = 0; n < c.size(); ++n)
    c[n] *= symbol[n];
  return RadialField(field.grid(), Representation::modes, std::move(c));
}

double bilinear_symbol(const RadialField &u, const RadialField &v,
                       const OperatorSymbol &symbol) {
  require_same_grid(u, v);
  if (symbol.sigma.size() != u.grid()->N())
    throw DomainError("bilinear form: symbol and field grids differ");
  const auto cu = u.modes();
  const auto cv = v.modes();
  double sum = 0.0;
  for (std::size_t n = 0; n < cu.size(); ++n)
    sum += symbol[n] * cu[n] * cv[n];
  return sum * u.grid()->mode_norm2();
}

double bilinear_b_alpha(const RadialField &u, const RadialField &v,
                        const ModelParams &params) {
  return bilinear_symbol(
      u, v, OperatorSymbol::make(u.grid(), params.s, params.alpha));
}

double l2_norm_sq(const RadialField &u) {
  const auto v = u.values();
  const auto w = u.grid()->weights();
  double sum = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j)
    sum += w[j] * v[j] * v[j];
  return sum;
}

double l2_norm_sq_parseval(const RadialField &u) {
  const auto c = u.modes();
  double sum = 0.0;
  for (double x : c)
    sum += x * x;
  return sum * u.grid()->mode_norm2();
}

double l2_inner(const RadialField &u, const RadialField &v) {
  require_same_grid(u, v);
  const auto a = u.modes();
  const auto b = v.modes();
  double sum = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n)
    sum += a[n] * b[n];
  return sum * u.grid()->mode_norm2();
}

double lq_norm(const RadialField &u, double q) {
  if (!(q >= 2.0 && q <= 6.0)) {
    std::ostringstream msg;
    msg << "lq_norm: exponent " << q << " outside [2,6]";
    throw DomainError(msg.str());
  }
  const auto v = u.values();
  const auto w = u.grid()->weights();
  double sum = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j)
    sum += w[j] * std::pow(std::abs(v[j]), q);
  return std::pow(sum, 1.0 / q);
}

double gradient_norm_sq(const RadialField &u) {
  const auto c = u.modes();
  const auto k = u.grid()->frequencies();
  double sum = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n)
    sum += k[n] * k[n] * c[n] * c[n];
  return sum * u.grid()->mode_norm2();
}

double h1_norm_sq(const RadialField &u) {
  const auto c = u.modes();
  const auto k = u.grid()->frequencies();
  double sum = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n)
    sum += (1.0 + k[n] * k[n]) * c[n] * c[n];
  return sum * u.grid()->mode_norm2();
}

double w_norm_sq(const RadialField &u, const std::function<double(double)> &V,
                 double v0) {
  const auto vals = u.values();
  const auto r = u.grid()->nodes();
  const auto w = u.grid()->weights();
  double weighted = 0.0;
  for (std::size_t j = 0; j < vals.size(); ++j)
    weighted += w[j] * (V(r[j]) - v0) * vals[j] * vals[j];
  return h1_norm_sq(u) + weighted;
}

} // namespace kgm
