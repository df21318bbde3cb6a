#include "cadact/ui_layout.hpp"

namespace cadact::ui {

std::string_view field_name(Field f) {
  switch (f) {
    case Field::None: return "None";
    case Field::OffsetField: return "OffsetField";
    case Field::DirectionArrow: return "DirectionArrow";
    case Field::TypeSelector: return "TypeSelector";
    case Field::DepthField: return "DepthField";
    case Field::SymmetricBox: return "SymmetricBox";
    case Field::MergeBox: return "MergeBox";
    case Field::SecondDepthField: return "SecondDepthField";
  }
  return "?";
}

}  // namespace cadact::ui
