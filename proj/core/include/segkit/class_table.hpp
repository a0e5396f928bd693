#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace segkit {

enum class Category { pickupable, receptacle, openable };
enum class SizeClass { small, medium, large };

std::string_view to_string(Category c);
std::string_view to_string(SizeClass s);
Category parse_category(std::string_view text);
SizeClass parse_size(std::string_view text);

struct ClassEntry {
    std::string name;
    Category category = Category::pickupable;
    SizeClass size = SizeClass::small;

    friend bool operator==(ClassEntry const&, ClassEntry const&) = default;
};

/// Ordered set of object classes. A class is identified by its index.
class ClassTable {
  public:
    ClassTable() = default;
    explicit ClassTable(std::vector<ClassEntry> entries);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    ClassEntry const& at(std::size_t index) const { return entries_.at(index); }
    std::vector<ClassEntry> const& entries() const { return entries_; }
    std::optional<std::size_t> index_of(std::string_view name) const;

    /// The 54 interactable indoor classes (18 receptacles, 25 pickupable, 11 openable).
    static ClassTable indoor54();

    /// A reduced table of `count` classes drawn from indoor54, mixing categories.
    static ClassTable toy(std::size_t count);

    friend bool operator==(ClassTable const&, ClassTable const&) = default;

  private:
    std::vector<ClassEntry> entries_;
};

} // namespace segkit
