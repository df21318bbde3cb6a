#pragma once

// Screen layout shared by the compiler (click targets) and the simulator
// (hit tests). Canvas coordinates, v up.

#include <array>
#include <string_view>

#include "cadact/geometry.hpp"

namespace cadact::ui {

using geo::PixelPoint;

// Edge/endpoint hit radius at zoom 1.
inline constexpr double kHitRadius = 0.004;
inline constexpr double kZoomMin = 0.1;
inline constexpr double kZoomMax = 10.0;
inline constexpr double kZoomRate = 0.1;

struct Rect {
  double u0, v0, u1, v1;

  bool contains(const PixelPoint& p) const { return p.x() >= u0 && p.x() <= u1 && p.y() >= v0 && p.y() <= v1; }
  PixelPoint center() const { return {0.5 * (u0 + u1), 0.5 * (v0 + v1)}; }
};

inline constexpr Rect kPlaneIcon{0.015, 0.960, 0.045, 0.990};
inline constexpr Rect kTreePanel{0.0, 0.60, 0.10, 0.95};
inline constexpr Rect kDialogPanel{0.75, 0.55, 0.98, 0.95};
inline constexpr Rect kDirectionArrow{0.925, 0.785, 0.955, 0.815};

inline constexpr double kTreeTop = 0.93;
inline constexpr double kTreeRowHeight = 0.025;
inline constexpr int kMaxTreeRows = 13;

// Rows 0..2 hold Top, Front, Right; custom planes follow in creation order.
inline int default_plane_row(int plane_id) { return 2 - plane_id; }

inline Rect tree_row(int row) {
  const double c = kTreeTop - kTreeRowHeight * row;
  return {0.005, c - kTreeRowHeight / 2 + 0.002, 0.095, c + kTreeRowHeight / 2 - 0.002};
}

inline int tree_row_at(const PixelPoint& p) {
  for (int r = 0; r < kMaxTreeRows; ++r)
    if (tree_row(r).contains(p)) return r;
  return -1;
}

enum class Field : int { None, OffsetField, DirectionArrow, TypeSelector, DepthField, SymmetricBox, MergeBox, SecondDepthField };

std::string_view field_name(Field f);

inline constexpr std::array<Field, 2> kPlaneDialogOrder = {Field::OffsetField, Field::DirectionArrow};
inline constexpr std::array<Field, 5> kExtrudeDialogOrder = {Field::TypeSelector, Field::DepthField, Field::SymmetricBox,
                                                             Field::MergeBox, Field::SecondDepthField};

inline bool is_text_field(Field f) {
  return f == Field::OffsetField || f == Field::DepthField || f == Field::SecondDepthField;
}

// Extrude type list under the TypeSelector, indexed like the op code.
inline constexpr int kExtrudeTypeCount = 3;

}  // namespace cadact::ui
