#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "jumpgeo/connection.hpp"
#include "jumpgeo/geometry.hpp"

namespace jumpgeo {

/// Geodesic displacement above which a recorded step counts as a jump.
inline constexpr double kJumpThreshold = 1e-9;
/// Partition times closer than this are merged.
inline constexpr double kTimeDedupTol = 1e-12;

/// One recorded state of a cadlag path. `mark`, when present, is the jump
/// direction Delta X_t in T_{X_{t-}}M, i.e. based at the previous event's point.
struct PathEvent {
    double t = 0.0;
    Vector x;
    std::optional<Vector> mark;
};

enum class Interpolation {
    PiecewiseConstant,  ///< pure-jump: every displaced event carries a mark
    RecordedGrid,       ///< unmarked events are sampled continuous increments
};

/// A finite sample path (Delta X, X) on a manifold, constant between events.
class DeltaPath {
  public:
    /// Validates: t_0 = 0 with no mark, strictly increasing times, horizon >= last
    /// time, every point on the manifold, every mark tangent at the pre-jump point.
    DeltaPath(Manifold manifold, std::vector<PathEvent> events, double horizon,
              Interpolation interpolation = Interpolation::PiecewiseConstant);

    /// Builds a path from recorded points, marking every step whose geodesic
    /// displacement exceeds kJumpThreshold with gamma(x_{k-1}, x_k).
    static DeltaPath from_skeleton(const ConnectionRule& rule, std::span<const double> times,
                                   std::span<const Vector> points, double horizon);

    /// Constant path at x on [0, horizon].
    static DeltaPath constant(Manifold manifold, Vector x, double horizon);

    const Manifold& manifold() const { return manifold_; }
    const std::vector<PathEvent>& events() const { return events_; }
    double horizon() const { return horizon_; }
    Interpolation interpolation() const { return interpolation_; }
    std::size_t size() const { return events_.size(); }

    std::vector<double> jump_times() const;
    /// Index of the last event with t_k <= t.
    std::size_t index_at(double t) const;
    /// Same path with marks replaced (skeleton unchanged). `marks[k]` for event k.
    DeltaPath with_marks(std::vector<std::optional<Vector>> marks) const;

  private:
    Manifold manifold_;
    std::vector<PathEvent> events_;
    double horizon_;
    Interpolation interpolation_;
};

struct CadlagValue {
    Vector value;       ///< X_t
    Vector left_limit;  ///< X_{t-}
};

/// Right-continuous value and left limit at t in [0, horizon].
CadlagValue sample_at(const DeltaPath& path, double t);

/// Ordered times 0 = T_0 < T_1 < ... < T_k.
class Partition {
  public:
    explicit Partition(std::vector<double> times);

    const std::vector<double>& times() const { return times_; }
    std::size_t size() const { return times_.size(); }
    double mesh() const;
    bool contains(double t, double tol = kTimeDedupTol) const;

  private:
    std::vector<double> times_;
};

/// Uniform grid of spacing <= mesh on [0, horizon] merged with the mandatory
/// times. When a grid time and a mandatory time coincide within 1e-12 the
/// mandatory one is kept.
Partition build_partition(double horizon, double mesh, std::span<const double> mandatory = {});

/// Splits every cell into `factor` equal cells.
Partition refine(const Partition& p, int factor);

/// Partition on [0, path.horizon()] containing every event time of the path.
Partition partition_for(const DeltaPath& path, double mesh);

/// Path CSV: header `t,x_0,..,x_{a-1},jump,dx_0,..,dx_{a-1}`, 17 significant digits.
void write_path_csv(std::ostream& os, const DeltaPath& path);
/// Inverse of write_path_csv. `horizon` defaults to the last event time. Paths
/// with unmarked displaced events are read as RecordedGrid.
DeltaPath read_path_csv(std::istream& is, const Manifold& manifold,
                        std::optional<double> horizon = std::nullopt);

}  // namespace jumpgeo
