#include "amv/core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "amv/core/io.hpp"

namespace amv {

Grid::Grid(Box box, std::vector<int> cells) : box_(std::move(box)), cells_(std::move(cells)) {
  if (static_cast<int>(cells_.size()) != box_.dim()) throw ConfigError("grid: one cell count per axis required");
  if (box_.dim() > kMaxDim) throw ConfigError("grid: dimension too large");
  size_ = 1;
  strides_.resize(cells_.size());
  for (int a = 0; a < box_.dim(); ++a) {
    if (cells_[a] < 2) throw ConfigError("grid: at least two cells per axis required");
    h_.push_back(box_.width(a) / cells_[a]);
    strides_[a] = size_;
    size_ *= static_cast<std::size_t>(cells_[a] + 1);
  }
}

Grid Grid::uniform(const Box& box, int cells) { return Grid(box, std::vector<int>(box.dim(), cells)); }

double Grid::max_h() const { return *std::max_element(h_.begin(), h_.end()); }

std::vector<int> Grid::multi_index(std::size_t index) const {
  std::vector<int> m(dim());
  for (int a = 0; a < dim(); ++a) {
    m[a] = static_cast<int>(index % nodes(a));
    index /= nodes(a);
  }
  return m;
}

std::size_t Grid::index(const std::vector<int>& multi) const {
  std::size_t k = 0;
  for (int a = 0; a < dim(); ++a) k += strides_[a] * static_cast<std::size_t>(multi[a]);
  return k;
}

Point Grid::point(std::size_t index) const {
  Point p(dim());
  for (int a = 0; a < dim(); ++a) {
    p[a] = coord(a, static_cast<int>(index % nodes(a)));
    index /= nodes(a);
  }
  return p;
}

bool Grid::is_boundary(std::size_t index) const {
  for (int a = 0; a < dim(); ++a) {
    const auto i = static_cast<int>(index % nodes(a));
    if (i == 0 || i == cells_[a]) return true;
    index /= nodes(a);
  }
  return false;
}

std::vector<std::size_t> Grid::interior() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < size_; ++k) {
    if (!is_boundary(k)) out.push_back(k);
  }
  return out;
}

std::vector<std::size_t> Grid::nodes_in(const Box& sub) const {
  std::vector<std::size_t> out;
  const double slack = 1e-12 * max_h();
  for (std::size_t k = 0; k < size_; ++k) {
    const Point p = point(k);
    bool in = true;
    for (int a = 0; a < dim() && in; ++a) in = p[a] >= sub.lo[a] - slack && p[a] <= sub.hi[a] + slack;
    if (in) out.push_back(k);
  }
  return out;
}

Grid Grid::refined() const {
  std::vector<int> c(cells_);
  for (int& v : c) v *= 2;
  return Grid(box_, c);
}

GridFunction::GridFunction(Grid grid, Eigen::VectorXd values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_.size()) throw ConfigError("grid function: value count does not match the grid");
}

GridFunction GridFunction::sample(const Grid& grid, const ScalarField& f) {
  Eigen::VectorXd v(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) v[k] = f(grid.point(k));
  return {grid, v};
}

double GridFunction::interpolate(PointView x) const {
  const int n = grid_.dim();
  std::array<int, kMaxDim> start{};
  std::array<std::array<double, 4>, kMaxDim> wts{};
  for (int a = 0; a < n; ++a) {
    const int last = grid_.cells(a);
    const double t = (x[a] - grid_.box().lo[a]) / grid_.h(a);
    if (t < -1e-9 || t > last + 1e-9) throw DomainError("grid function evaluated outside its box");
    const int i = std::clamp(static_cast<int>(std::floor(t)), 0, last - 1);
    const int s = last >= 3 ? std::clamp(i - 1, 0, last - 3) : 0;
    const int npts = std::min(4, last + 1);
    start[a] = s;
    for (int j = 0; j < 4; ++j) {
      double w = 0.0;
      if (j < npts) {
        w = 1.0;
        for (int m = 0; m < npts; ++m) {
          if (m != j) w *= (t - (s + m)) / static_cast<double>(j - m);
        }
      }
      wts[a][j] = w;
    }
  }
  std::array<int, kMaxDim> off{};
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    std::size_t k = 0;
    for (int a = 0; a < n; ++a) {
      w *= wts[a][off[a]];
      k += grid_.stride(a) * static_cast<std::size_t>(std::min(start[a] + off[a], grid_.cells(a)));
    }
    if (w != 0.0) sum += w * values_[static_cast<Eigen::Index>(k)];
    int a = 0;
    while (a < n && ++off[a] == 4) off[a++] = 0;
    if (a == n) break;
  }
  return sum;
}

ScalarField GridFunction::as_field(std::string descriptor) const {
  auto self = std::make_shared<const GridFunction>(*this);
  return ScalarField::from_callable([self](PointView x) { return self->interpolate(x); }, std::move(descriptor), grid_.dim());
}

void GridFunction::write_csv(const std::string& path) const {
  std::vector<std::string> header{"index"};
  for (int a = 0; a < grid_.dim(); ++a) header.push_back("x" + std::to_string(a + 1));
  header.push_back("value");
  CsvTable t(header);
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    std::vector<std::string> row{std::to_string(k)};
    for (const double c : grid_.point(k)) row.push_back(format_number(c));
    row.push_back(format_number(values_[static_cast<Eigen::Index>(k)]));
    t.add_row(row);
  }
  t.write(path);
}

}  // namespace amv
