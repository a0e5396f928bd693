#include "segkit/class_table.hpp"

#include "segkit/error.hpp"

#include <algorithm>
#include <set>

namespace segkit {

std::string_view to_string(Category c) {
    switch (c) {
    case Category::pickupable: return "pickupable";
    case Category::receptacle: return "receptacle";
    case Category::openable: return "openable";
    }
    return "?";
}

std::string_view to_string(SizeClass s) {
    switch (s) {
    case SizeClass::small: return "small";
    case SizeClass::medium: return "medium";
    case SizeClass::large: return "large";
    }
    return "?";
}

Category parse_category(std::string_view text) {
    if (text == "pickupable") return Category::pickupable;
    if (text == "receptacle") return Category::receptacle;
    if (text == "openable") return Category::openable;
    throw ValidationError("unknown class category '" + std::string(text) + "'");
}

SizeClass parse_size(std::string_view text) {
    if (text == "small") return SizeClass::small;
    if (text == "medium") return SizeClass::medium;
    if (text == "large") return SizeClass::large;
    throw ValidationError("unknown class size '" + std::string(text) + "'");
}

ClassTable::ClassTable(std::vector<ClassEntry> entries) : entries_(std::move(entries)) {
    std::set<std::string> seen;
    for (auto const& e : entries_) {
        if (e.name.empty()) {
            throw ValidationError("class table contains an empty name");
        }
        if (!seen.insert(e.name).second) {
            throw ValidationError("duplicate class name '" + e.name + "'");
        }
    }
}

std::optional<std::size_t> ClassTable::index_of(std::string_view name) const {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](ClassEntry const& e) { return e.name == name; });
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - entries_.begin());
}

ClassTable ClassTable::indoor54() {
    using C = Category;
    using S = SizeClass;
    std::vector<ClassEntry> e;
    auto add = [&](C c, S s, std::initializer_list<char const*> names) {
        for (auto const* n : names) {
            e.push_back({n, c, s});
        }
    };
    add(C::receptacle, S::large,
        {"CounterTop", "DiningTable", "Sofa", "Bed", "Bathtub", "Desk", "BathtubBasin", "TVStand"});
    add(C::receptacle, S::medium,
        {"Shelf", "Sink", "GarbageCan", "SideTable", "SinkBasin", "ArmChair", "CoffeeTable",
         "Ottoman"});
    add(C::receptacle, S::small, {"StoveBurner", "ToiletPaperHanger"});
    // Openable objects are only grouped as "medium and large"; they are filed as large.
    add(C::openable, S::large,
        {"Cabinet", "Drawer", "Toilet", "Blinds", "Fridge", "Microwave", "Dresser", "ShowerDoor",
         "ShowerCurtain", "Safe", "LaundryHumper"});
    add(C::pickupable, S::medium,
        {"Statue", "Laptop", "Pan", "Pot", "Vase", "TissueBox", "BaseballBat", "WateringCan"});
    add(C::pickupable, S::small,
        {"SoapBottle", "ToiletPaper", "Bowl", "Mug", "Box", "Plate", "Plunger", "SprayBottle",
         "ScrubBrush", "Book", "DishSponge", "Cup", "SoapBar", "AlarmClock", "Newspaper",
         "PaperTowelRoll", "BasketBall"});
    return ClassTable(std::move(e));
}

ClassTable ClassTable::toy(std::size_t count) {
    auto const full = indoor54();
    if (count == 0 || count > full.size()) {
        throw ArgumentError("toy class table size must be in [1, 54]");
    }
    static constexpr char const* preferred[] = {"Mug",   "Sofa",    "Bowl", "Laptop",
                                                "Cabinet", "GarbageCan", "Book", "Fridge"};
    std::vector<ClassEntry> out;
    for (auto const* name : preferred) {
        if (out.size() == count) break;
        out.push_back(full.at(*full.index_of(name)));
    }
    for (auto const& entry : full.entries()) {
        if (out.size() == count) break;
        if (std::none_of(out.begin(), out.end(),
                         [&](ClassEntry const& o) { return o.name == entry.name; })) {
            out.push_back(entry);
        }
    }
    return ClassTable(std::move(out));
}

} // namespace segkit
