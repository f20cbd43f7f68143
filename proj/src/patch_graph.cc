#include "omnivo/patch_graph.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace omnivo {

bool within_radius(FrameId source, FrameId target, int radius) {
  const int gap = std::abs(target - source);
  return gap > 0 && gap < radius;
}

double default_min_separation(int image_width) {
  return 8.0 * image_width / 3840.0;
}

namespace {

// Buckets accepted centers on a grid of cell size >= min_separation so that a
// candidate only needs to be checked against nearby cells.
class SuppressionGrid {
 public:
  SuppressionGrid(int width, int height, double min_separation)
      : width_(width), min_sep_(min_separation) {
    cell_ = std::max(1.0, min_separation);
    cols_ = static_cast<int>(std::ceil(width / cell_));
    rows_ = static_cast<int>(std::ceil(height / cell_));
    cells_.resize(static_cast<size_t>(cols_) * rows_);
  }

  bool is_free(double u, double v) const {
    const int cx = static_cast<int>(u / cell_);
    const int cy = static_cast<int>(v / cell_);
    // The last column can be narrower than a cell, so reach two cells out
    // horizontally to cover wrap-around neighbors.
    std::vector<int> cols;
    if (cols_ <= 5) {
      cols.resize(cols_);
      std::iota(cols.begin(), cols.end(), 0);
    } else {
      for (int dx = -2; dx <= 2; ++dx) cols.push_back(((cx + dx) % cols_ + cols_) % cols_);
    }
    for (int y = std::max(0, cy - 1); y <= std::min(rows_ - 1, cy + 1); ++y) {
      for (int x : cols) {
        for (const Eigen::Vector2d& q : cells_[static_cast<size_t>(y) * cols_ + x]) {
          double du = std::abs(q.x() - u);
          du = std::min(du, width_ - du);
          const double dv = q.y() - v;
          if (std::sqrt(du * du + dv * dv) < min_sep_) return false;
        }
      }
    }
    return true;
  }

  void insert(double u, double v) {
    const int cx = static_cast<int>(u / cell_);
    const int cy = static_cast<int>(v / cell_);
    cells_[static_cast<size_t>(cy) * cols_ + cx].emplace_back(u, v);
  }

 private:
  double width_;
  double min_sep_;
  double cell_;
  int cols_;
  int rows_;
  std::vector<std::vector<Eigen::Vector2d>> cells_;
};

}  // namespace

PatchSelection select_patch_centers(const ScoreMap& score_map, int n,
                                    double min_separation) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "patch count must be >= 1");
  const int height = static_cast<int>(score_map.rows());
  const int width = static_cast<int>(score_map.cols());
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "empty score map");
  }

  std::vector<int> order(static_cast<size_t>(width) * height);
  std::iota(order.begin(), order.end(), 0);
  const double* data = score_map.data();
  // Index order is already (row, column) lexicographic, so a stable sort on
  // score alone implements the tie-break.
  std::stable_sort(order.begin(), order.end(),
                   [data](int a, int b) { return data[a] > data[b]; });

  PatchSelection selection;
  SuppressionGrid grid(width, height, min_separation);
  for (int idx : order) {
    const double u = idx % width;
    const double v = idx / width;
    if (min_separation > 0.0 && !grid.is_free(u, v)) continue;
    grid.insert(u, v);
    selection.centers.push_back({u, v});
    if (static_cast<int>(selection.centers.size()) == n) break;
  }
  selection.insufficient_candidates = static_cast<int>(selection.centers.size()) < n;
  return selection;
}

PatchGraph::PatchGraph(int radius, int patches_per_frame, double default_inv_depth)
    : radius_(radius),
      patches_per_frame_(patches_per_frame),
      default_inv_depth_(default_inv_depth) {
  if (radius < 1) throw Error(ErrorCode::kInvalidArgument, "radius must be >= 1");
  if (patches_per_frame < 1) {
    throw Error(ErrorCode::kInvalidArgument, "patches per frame must be >= 1");
  }
  if (!(default_inv_depth > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth, "default inverse depth must be positive");
  }
}

PatchGraph PatchGraph::restore(int radius, int patches_per_frame,
                               std::vector<FrameId> active_frames,
                               std::vector<Patch> patches, std::vector<Edge> edges) {
  PatchGraph g(radius, patches_per_frame);
  std::sort(active_frames.begin(), active_frames.end());
  if (std::adjacent_find(active_frames.begin(), active_frames.end()) != active_frames.end()) {
    throw Error(ErrorCode::kDuplicateFrame, "frame listed twice");
  }
  g.frames_ = std::move(active_frames);
  if (!g.frames_.empty()) {
    g.last_frame_ = g.frames_.back();
    g.any_frame_ = true;
  }
  for (Patch& p : patches) {
    if (!g.is_active(p.source_frame)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "patch " + std::to_string(p.id) + " references inactive frame");
    }
    if (!(p.inv_depth.value > 0.0)) {
      throw Error(ErrorCode::kNonPositiveDepth,
                  "patch " + std::to_string(p.id) + " has non-positive depth");
    }
    g.next_patch_id_ = std::max(g.next_patch_id_, p.id + 1);
    const PatchId id = p.id;
    if (!g.patches_.emplace(id, std::move(p)).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate patch id " + std::to_string(id));
    }
  }
  std::set<Edge> seen;
  for (const Edge& e : edges) {
    auto it = g.patches_.find(e.patch);
    if (it == g.patches_.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "edge references unknown patch " + std::to_string(e.patch));
    }
    if (!g.is_active(e.target_frame) ||
        !within_radius(it->second.source_frame, e.target_frame, radius)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "edge (" + std::to_string(e.patch) + ", " +
                      std::to_string(e.target_frame) + ") violates the radius rule");
    }
    if (!seen.insert(e).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate edge");
    }
    g.edges_.push_back(e);
  }
  return g;
}

bool PatchGraph::is_active(FrameId frame) const {
  return std::binary_search(frames_.begin(), frames_.end(), frame);
}

const Patch& PatchGraph::patch(PatchId id) const {
  auto it = patches_.find(id);
  if (it == patches_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown patch " + std::to_string(id));
  }
  return it->second;
}

void PatchGraph::set_inv_depth(PatchId id, InverseDepth d) {
  auto it = patches_.find(id);
  if (it == patches_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown patch " + std::to_string(id));
  }
  if (!(d.value > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth, "inverse depth must be positive");
  }
  it->second.inv_depth = d;
}

void PatchGraph::add_edge(PatchId patch, FrameId target) {
  edges_.push_back({patch, target});
}

std::vector<PatchId> PatchGraph::add_frame(FrameId frame,
                                           std::span<const PixelCoord> centers) {
  if (any_frame_ && frame <= last_frame_) {
    throw Error(ErrorCode::kDuplicateFrame,
                "frame " + std::to_string(frame) + " is not newer than frame " +
                    std::to_string(last_frame_));
  }
  if (static_cast<int>(centers.size()) != patches_per_frame_) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(patches_per_frame_) + " centers, got " +
                    std::to_string(centers.size()));
  }
  const InverseDepth depth = init_depth(frame);

  for (const auto& [id, p] : patches_) {
    if (within_radius(p.source_frame, frame, radius_)) add_edge(id, frame);
  }

  std::vector<PatchId> created;
  created.reserve(centers.size());
  for (const PixelCoord& c : centers) {
    Patch p;
    p.id = next_patch_id_++;
    p.source_frame = frame;
    p.center = c;
    p.inv_depth = depth;
    patches_.emplace(p.id, p);
    created.push_back(p.id);
    for (FrameId j : frames_) {
      if (within_radius(frame, j, radius_)) add_edge(p.id, j);
    }
  }

  frames_.push_back(frame);
  last_frame_ = frame;
  any_frame_ = true;
  return created;
}

InverseDepth PatchGraph::init_depth(FrameId frame) const {
  FrameId best = frame;
  bool found = false;
  auto scan = [&](const std::map<PatchId, Patch>& patches) {
    for (const auto& [id, p] : patches) {
      if (p.source_frame < frame && (!found || p.source_frame > best)) {
        best = p.source_frame;
        found = true;
      }
    }
  };
  scan(patches_);
  scan(archived_);
  if (!found) return InverseDepth(default_inv_depth_);

  double sum = 0.0;
  int count = 0;
  auto accumulate = [&](const std::map<PatchId, Patch>& patches) {
    for (const auto& [id, p] : patches) {
      if (p.source_frame == best) {
        sum += p.inv_depth.value;
        ++count;
      }
    }
  };
  accumulate(patches_);
  accumulate(archived_);
  return InverseDepth(sum / count);
}

std::vector<FrameId> PatchGraph::retire_frames(int window) {
  if (window < 2) throw Error(ErrorCode::kInvalidArgument, "window must be >= 2");
  std::vector<FrameId> removed;
  if (static_cast<int>(frames_.size()) <= window) return removed;

  const size_t drop = frames_.size() - static_cast<size_t>(window);
  removed.assign(frames_.begin(), frames_.begin() + static_cast<std::ptrdiff_t>(drop));
  frames_.erase(frames_.begin(), frames_.begin() + static_cast<std::ptrdiff_t>(drop));

  std::erase_if(edges_, [&](const Edge& e) {
    return !is_active(e.target_frame) || !is_active(patches_.at(e.patch).source_frame);
  });

  // Patches of removed frames have lost every edge; archive them with their
  // final depth.
  for (auto it = patches_.begin(); it != patches_.end();) {
    if (!is_active(it->second.source_frame)) {
      archived_.insert(*it);
      it = patches_.erase(it);
    } else {
      ++it;
    }
  }
  return removed;
}

PatchGraph PatchGraph::subgraph(const std::set<FrameId>& keep) const {
  std::vector<FrameId> frames;
  for (FrameId f : frames_) {
    if (keep.count(f)) frames.push_back(f);
  }
  std::vector<Patch> patches;
  for (const auto& [id, p] : patches_) {
    if (keep.count(p.source_frame)) patches.push_back(p);
  }
  std::vector<Edge> edges;
  for (const Edge& e : edges_) {
    if (keep.count(e.target_frame) && keep.count(patches_.at(e.patch).source_frame)) {
      edges.push_back(e);
    }
  }
  PatchGraph g = restore(radius_, patches_per_frame_, std::move(frames),
                         std::move(patches), std::move(edges));
  g.default_inv_depth_ = default_inv_depth_;
  g.next_patch_id_ = std::max(g.next_patch_id_, next_patch_id_);
  g.last_frame_ = last_frame_;
  g.any_frame_ = any_frame_;
  return g;
}

}  // namespace omnivo
