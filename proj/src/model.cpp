#include <rdmeta/model.hpp>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rdmeta {

int LatticeConfig::particle_count() const {
  return std::accumulate(occupancy.begin(), occupancy.end(), 0);
}

LatticeConfig LatticeConfig::constant(int n, int value) {
  if (n < 1) throw std::invalid_argument("lattice size must be positive");
  if (value != 0 && value != 1) throw std::invalid_argument("occupancy must be 0 or 1");
  LatticeConfig c;
  c.occupancy.assign(static_cast<std::size_t>(n), static_cast<std::uint8_t>(value));
  return c;
}

LatticeConfig LatticeConfig::from_string(const std::string& bits) {
  LatticeConfig c;
  c.occupancy.reserve(bits.size());
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("occupancy string must be 0/1");
    c.occupancy.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  if (c.occupancy.empty()) throw std::invalid_argument("empty occupancy string");
  return c;
}

std::string LatticeConfig::to_string() const {
  std::string s(occupancy.size(), '0');
  for (std::size_t i = 0; i < occupancy.size(); ++i) s[i] = occupancy[i] ? '1' : '0';
  return s;
}

CylinderRate::CylinderRate(int radius, Vector table) : radius_(radius), table_(std::move(table)) {
  if (radius_ < 0) throw std::invalid_argument("rate window radius must be nonnegative");
  const Index expected = Index(1) << (2 * radius_ + 1);
  if (table_.size() != expected)
    throw std::invalid_argument("rate table must have 2^(2r+1) entries");
  if (table_.minCoeff() <= 0.0)
    throw std::invalid_argument("jump rates must be strictly positive");
}

int CylinderRate::pattern_at(const LatticeConfig& c, int site) const {
  int pattern = 0;
  for (int k = -radius_; k <= radius_; ++k) pattern |= c.at(site + k) << (k + radius_);
  return pattern;
}

CylinderRate build_rate_table(Real a0, Real a1, Real a2) {
  if (a0 <= 0.0 || a1 <= 0.0 || a2 <= 0.0)
    throw std::invalid_argument("jump rates must be strictly positive");
  Vector table(8);
  for (int pattern = 0; pattern < 8; ++pattern) {
    const int left = pattern & 1, center = (pattern >> 1) & 1, right = (pattern >> 2) & 1;
    if (left != right)
      table[pattern] = a2;
    else if (left == center)
      table[pattern] = a1;
    else
      table[pattern] = a0;
  }
  CylinderRate r(1, std::move(table));
  r.triple_ = std::array<Real, 3>{a0, a1, a2};
  return r;
}

CylinderRate build_rate_table(int radius, Vector table) {
  return CylinderRate(radius, std::move(table));
}

namespace {

Real basis_fn(int k, Real theta) {
  if (k == 0) return 1.0;
  if (k > 0) return std::sqrt(2.0) * std::cos(2.0 * kPi * k * theta);
  return std::sqrt(2.0) * std::sin(2.0 * kPi * (-k) * theta);
}

void check_coords(const MeasureCoords& m) {
  const Real slack = 1e-9;
  if (std::abs(m.coeff(0)) > 1.0 + slack)
    throw std::invalid_argument("measure mass exceeds 1");
  for (int k = 1; k <= m.truncation; ++k)
    if (std::abs(m.coeff(k)) > std::sqrt(2.0) + slack ||
        std::abs(m.coeff(-k)) > std::sqrt(2.0) + slack)
      throw std::invalid_argument("measure coordinate exceeds sqrt(2)");
}

}  // namespace

MeasureCoords empirical_measure(const LatticeConfig& config, int truncation) {
  if (truncation < 0) throw std::invalid_argument("truncation must be nonnegative");
  const int n = config.n_sites();
  MeasureCoords m;
  m.truncation = truncation;
  m.coeffs = Vector::Zero(2 * truncation + 1);
  for (int x = 0; x < n; ++x) {
    if (!config.occupancy[static_cast<std::size_t>(x)]) continue;
    const Real theta = Real(x) / Real(n);
    for (int k = -truncation; k <= truncation; ++k) m.coeffs[k + truncation] += basis_fn(k, theta);
  }
  m.coeffs /= Real(n);
  check_coords(m);
  return m;
}

MeasureCoords measure_coords(const Vector& grid_density, int truncation) {
  if (truncation < 0) throw std::invalid_argument("truncation must be nonnegative");
  const Index mgrid = grid_density.size();
  MeasureCoords m;
  m.truncation = truncation;
  m.coeffs = Vector::Zero(2 * truncation + 1);
  for (Index j = 0; j < mgrid; ++j) {
    const Real theta = Real(j) / Real(mgrid);
    for (int k = -truncation; k <= truncation; ++k)
      m.coeffs[k + truncation] += grid_density[j] * basis_fn(k, theta);
  }
  m.coeffs /= Real(mgrid);
  return m;
}

MeasureDistance measure_distance(const MeasureCoords& m1, const MeasureCoords& m2) {
  if (m1.truncation != m2.truncation)
    throw std::invalid_argument("measure coordinates have mismatched truncation");
  const int K = m1.truncation;
  MeasureDistance d;
  for (int k = -K; k <= K; ++k)
    d.value += std::pow(2.0, -std::abs(k)) * std::abs(m1.coeff(k) - m2.coeff(k));
  // |<rho1 - rho2, e_k>| <= 2 sqrt(2); sum over |k| > K of 2^-|k| equals 2^(1-K)
  d.tail_bound = 2.0 * (2.0 * std::sqrt(2.0)) * std::pow(2.0, -K);
  return d;
}

}  // namespace rdmeta
