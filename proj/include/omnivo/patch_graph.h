#pragma once

#include <compare>
#include <map>
#include <set>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "omnivo/sphere_camera.h"

namespace omnivo {

using FrameId = int;
using PatchId = int;

struct Patch {
  // Side length of the image patch around the center. Only the center takes
  // part in optimization; the extent is carried along as metadata.
  static constexpr int kExtent = 3;

  PatchId id = 0;
  FrameId source_frame = 0;
  PixelCoord center;
  InverseDepth inv_depth;
};

// Observation of a patch in a target frame.
struct Edge {
  PatchId patch = 0;
  FrameId target_frame = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Row-major score image, rows = height, cols = width.
using ScoreMap = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct PatchSelection {
  std::vector<PixelCoord> centers;
  // Set when suppression left fewer than the requested number of maxima;
  // `centers` then holds all that were found.
  bool insufficient_candidates = false;
};

// Greedy maxima selection: pixels are visited by descending score (ties by
// row, then column) and accepted when at least `min_separation` pixels away
// from every accepted center, measuring horizontal distance across the
// longitude seam.
PatchSelection select_patch_centers(const ScoreMap& score_map, int n,
                                    double min_separation);

// Suppression radius scaled from 8 px at 3840 columns.
double default_min_separation(int image_width);

class PatchGraph {
 public:
  static constexpr double kDefaultInitialInvDepth = 0.1;

  PatchGraph(int radius, int patches_per_frame,
             double default_inv_depth = kDefaultInitialInvDepth);

  // Rebuilds a graph from serialized parts. Edges must satisfy the radius
  // rule and reference existing patches and active frames.
  static PatchGraph restore(int radius, int patches_per_frame,
                            std::vector<FrameId> active_frames,
                            std::vector<Patch> patches, std::vector<Edge> edges);

  int radius() const { return radius_; }
  int patches_per_frame() const { return patches_per_frame_; }

  // Active frames in increasing order.
  const std::vector<FrameId>& frames() const { return frames_; }
  bool is_active(FrameId frame) const;

  // Live patches keyed by id (archived patches are not included).
  const std::map<PatchId, Patch>& patches() const { return patches_; }
  const std::map<PatchId, Patch>& archived_patches() const { return archived_; }
  const Patch& patch(PatchId id) const;
  void set_inv_depth(PatchId id, InverseDepth d);

  // Edges in insertion order.
  const std::vector<Edge>& edges() const { return edges_; }

  // Appends `frame` with one patch per center. The new patches get edges to
  // every active frame j with 0 < |j - frame| < radius, and existing patches
  // within the radius get an edge to the new frame. Depths start at
  // init_depth(frame). Returns the ids of the new patches.
  // Throws DuplicateFrame unless frame is past the newest frame seen so far.
  std::vector<PatchId> add_frame(FrameId frame, std::span<const PixelCoord> centers);

  // Mean inverse depth of the patches from the most recent frame before
  // `frame`, or the default when there is none.
  InverseDepth init_depth(FrameId frame) const;

  // Keeps only the newest `window` frames. Edges touching removed frames are
  // dropped, which leaves the removed frames' patches without edges; those
  // are archived with their final depth. Returns the removed frames, oldest
  // first.
  std::vector<FrameId> retire_frames(int window);

  // Copy restricted to the given frames: patches whose source is kept, and
  // edges between kept frames.
  PatchGraph subgraph(const std::set<FrameId>& keep) const;

 private:
  void add_edge(PatchId patch, FrameId target);

  int radius_;
  int patches_per_frame_;
  double default_inv_depth_;
  PatchId next_patch_id_ = 0;
  FrameId last_frame_ = -1;
  bool any_frame_ = false;

  std::vector<FrameId> frames_;
  std::map<PatchId, Patch> patches_;
  std::map<PatchId, Patch> archived_;
  std::vector<Edge> edges_;
};

// Brute-force statement of the edge rule, used to validate graphs.
bool within_radius(FrameId source, FrameId target, int radius);

}  // namespace omnivo
