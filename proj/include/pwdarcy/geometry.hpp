#pragma once

#include <string>
#include <Eigen/Core>

#include "pwdarcy/grid.hpp"

namespace pwdarcy {

enum class GeometryTag { layer2, curve2, multilayer, fault3, channel };

/// One of the parametric interface families. Each model partitions [0,1]^2
/// into N regions controlled by a parameter vector a of length k.
struct GeometryModel {
  GeometryTag tag = GeometryTag::layer2;
  int layers_K = 0;  // multilayer only: interpolation columns
  int layers_N = 0;  // multilayer only: region count

  int param_count() const;
  int region_count() const;
  std::string name() const;

  static GeometryModel parse(const std::string& name, int K = 0, int N = 0);
};

/// Per-node region assignment plus vertex-quadrature region areas (areas sum
/// to 1 exactly; every node carries exactly one index in 1..N).
struct RegionMasks {
  int n = 0;
  Eigen::MatrixXi region;  // (ix, iy), values 1..N
  Eigen::VectorXd areas;   // size N
};

/// Assigns each grid node to the unique region containing it. Nodes exactly
/// on an interface go to the lower region index.
RegionMasks region_masks(const GeometryModel& model, const Eigen::VectorXd& a,
                         const Grid& grid);

/// Per-region area of the symmetric difference A_i(a) Δ A_i(b), measured by
/// vertex quadrature on the common grid. Symmetric in its arguments.
Eigen::VectorXd symmetric_difference_area(const RegionMasks& m1, const RegionMasks& m2);

/// Region index (1-based) of the point (x, y); tie-break to the lower index.
int region_of_point(const GeometryModel& model, const Eigen::VectorXd& a, double x,
                    double y);

}  // namespace pwdarcy
