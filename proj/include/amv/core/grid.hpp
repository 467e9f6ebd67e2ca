#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "amv/core/common.hpp"
#include "amv/core/field.hpp"

namespace amv {

/// Uniform node grid on a box; nodes on the faces are boundary nodes.
class Grid {
 public:
  Grid(Box box, std::vector<int> cells);
  /// Same number of cells on every axis.
  static Grid uniform(const Box& box, int cells);

  const Box& box() const { return box_; }
  int dim() const { return box_.dim(); }
  int cells(int axis) const { return cells_[axis]; }
  int nodes(int axis) const { return cells_[axis] + 1; }
  double h(int axis) const { return h_[axis]; }
  double max_h() const;
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return strides_[axis]; }

  std::vector<int> multi_index(std::size_t index) const;
  std::size_t index(const std::vector<int>& multi) const;
  Point point(std::size_t index) const;
  double coord(int axis, int i) const { return box_.lo[axis] + h_[axis] * i; }
  bool is_boundary(std::size_t index) const;
  std::vector<std::size_t> interior() const;
  /// Nodes whose point lies in the closed sub-box.
  std::vector<std::size_t> nodes_in(const Box& sub) const;
  /// Grid with every cell count doubled.
  Grid refined() const;

 private:
  Box box_;
  std::vector<int> cells_;
  std::vector<double> h_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Nodal values on a Grid with tensor-product cubic interpolation.
class GridFunction {
 public:
  GridFunction(Grid grid, Eigen::VectorXd values);
  static GridFunction sample(const Grid& grid, const ScalarField& f);

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double max_abs() const { return values_.cwiseAbs().maxCoeff(); }

  /// Four-point Lagrange interpolation per axis; the stencil is shifted
  /// inward next to the faces.
  double interpolate(PointView x) const;
  /// Value-only field backed by interpolate(); shares the node values.
  ScalarField as_field(std::string descriptor = "grid") const;

  void write_csv(const std::string& path) const;

 private:
  Grid grid_;
  Eigen::VectorXd values_;
};

}  // namespace amv
