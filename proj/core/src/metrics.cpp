#include "segkit/metrics.hpp"

#include "segkit/assign.hpp"
#include "segkit/error.hpp"

#include "json.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <numeric>

namespace segkit {

using nlohmann::ordered_json;

IouAcc pixel_iou_acc(BinaryMask const& prediction, BinaryMask const& gt,
                     AccuracyDefinition definition) {
    auto const inter = static_cast<double>(intersection_area(prediction, gt));
    auto const p = static_cast<double>(prediction.area());
    auto const g = static_cast<double>(gt.area());
    IouAcc r;
    double const uni = p + g - inter;
    r.iou = uni > 0 ? inter / uni : 0.0;
    if (definition == AccuracyDefinition::foreground_recall) {
        r.acc = g > 0 ? inter / g : 0.0;
    } else {
        double const n = static_cast<double>(gt.values().size());
        r.acc = n > 0 ? (n - (p + g - 2 * inter)) / n : 0.0;
    }
    return r;
}

InstanceEval instance_iou_acc(InstanceMask const& gt, std::span<MaskCandidate const> predictions,
                              Point prompt, AccuracyDefinition definition) {
    InstanceEval e;
    e.instance_id = gt.instance_id;
    e.class_index = gt.label;
    MaskCandidate const* best = nullptr;
    for (auto const& c : predictions) {
        if (c.prompt_point == prompt && (!best || c.predicted_iou > best->predicted_iou)) {
            best = &c;
        }
    }
    if (!best) {
        return e;
    }
    auto const scores = pixel_iou_acc(best->mask, gt.mask, definition);
    e.matched = true;
    e.iou = scores.iou;
    e.acc = scores.acc;
    if (!best->label_logits.empty()) {
        e.predicted_label = argmax_lowest(best->label_logits);
    }
    return e;
}

InstanceEval instance_iou_acc(InstanceMask const& gt, std::span<MaskCandidate const> predictions,
                              PointGrid const& grid, FeatureMap const& features,
                              AccuracyDefinition definition) {
    auto const a = assign_mask(features, gt, grid);
    return instance_iou_acc(gt, predictions, a.grid_point, definition);
}

ClassScore const* EvalReport::find(std::string const& name) const {
    for (auto const& c : per_class) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

ClassificationAccuracy classification_accuracy(std::span<InstanceEval const> evals,
                                               ClassTable const& classes) {
    std::vector<std::size_t> counts(classes.size(), 0), correct(classes.size(), 0);
    for (auto const& e : evals) {
        if (e.class_index >= classes.size()) {
            throw ArgumentError("evaluation of '" + e.instance_id + "' has an unknown class");
        }
        ++counts[e.class_index];
        if (e.matched && e.predicted_label && *e.predicted_label == e.class_index) {
            ++correct[e.class_index];
        }
    }
    ClassificationAccuracy out;
    double sum = 0.0;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        if (counts[k] == 0) continue;
        double const v = static_cast<double>(correct[k]) / static_cast<double>(counts[k]);
        out.per_class.emplace_back(classes.at(k).name, v);
        sum += v;
    }
    if (!out.per_class.empty()) {
        out.mean = sum / static_cast<double>(out.per_class.size());
    }
    return out;
}

EvalReport per_class_aggregate(std::span<InstanceEval const> evals, ClassTable const& classes) {
    struct Values {
        std::vector<double> iou, acc;
    };
    std::vector<Values> values(classes.size());
    for (auto const& e : evals) {
        if (e.class_index >= classes.size()) {
            throw ArgumentError("evaluation of '" + e.instance_id + "' has an unknown class");
        }
        values[e.class_index].iou.push_back(e.iou);
        values[e.class_index].acc.push_back(e.acc);
    }
    // sorted summation keeps the means independent of input order
    auto sorted_sum = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        return std::accumulate(v.begin(), v.end(), 0.0);
    };
    auto const cls = classification_accuracy(evals, classes);
    std::map<std::string, double> cls_by_name(cls.per_class.begin(), cls.per_class.end());

    EvalReport r;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        auto& v = values[k];
        if (v.iou.empty()) continue;
        auto const n = static_cast<double>(v.iou.size());
        ClassScore c;
        c.name = classes.at(k).name;
        c.count = v.iou.size();
        c.iou = sorted_sum(v.iou) / n;
        c.acc = sorted_sum(v.acc) / n;
        c.cls_acc = cls_by_name[c.name];
        r.per_class.push_back(c);
    }
    if (!r.per_class.empty()) {
        auto const n = static_cast<double>(r.per_class.size());
        for (auto const& c : r.per_class) {
            r.miou += c.iou;
            r.macc += c.acc;
            r.mean_cls_acc += c.cls_acc;
        }
        r.miou /= n;
        r.macc /= n;
        r.mean_cls_acc /= n;
    }
    return r;
}

namespace {

ordered_json report_json(EvalReport const& report) {
    ordered_json j;
    j["per_class"] = ordered_json::object();
    for (auto const& c : report.per_class) {
        j["per_class"][c.name] = {{"count", c.count}, {"iou", c.iou}, {"acc", c.acc}, {"cls_acc", c.cls_acc}};
    }
    j["miou"] = report.miou;
    j["macc"] = report.macc;
    j["mean_cls_acc"] = report.mean_cls_acc;
    return j;
}

} // namespace

std::string report_to_json(EvalReport const& report) { return report_json(report).dump(2) + "\n"; }

EvalReport report_from_json(std::string const& text) {
    EvalReport r;
    try {
        auto const j = ordered_json::parse(text);
        for (auto const& [name, v] : j.at("per_class").items()) {
            r.per_class.push_back({name, v.at("count").get<std::size_t>(), v.at("iou").get<double>(),
                                   v.at("acc").get<double>(), v.at("cls_acc").get<double>()});
        }
        r.miou = j.at("miou").get<double>();
        r.macc = j.at("macc").get<double>();
        r.mean_cls_acc = j.at("mean_cls_acc").get<double>();
    } catch (ordered_json::exception const& e) {
        throw LoadError(std::string("malformed evaluation report: ") + e.what());
    }
    return r;
}

RenderedReport render_report(EvalReport const& report, EvalReport const* baseline) {
    RenderedReport out;
    std::string& t = out.text;
    if (baseline) {
        t += fmt::format("{:<20} {:>7} | {:>8} {:>8} {:>7} | {:>8} {:>8} {:>7} | {:>8} {:>8} {:>7}\n",
                         "Class", "Count", "b.IoU", "b.Acc", "b.Cls", "IoU", "Acc", "Cls",
                         "dIoU", "dAcc", "dCls");
    } else {
        t += fmt::format("{:<20} {:>7} | {:>8} {:>8} {:>7}\n", "Class", "Count", "IoU", "Acc", "Cls");
    }
    auto row = [&](std::string const& name, std::string const& count, double iou, double acc,
                   double cls, ClassScore const* base) {
        if (baseline) {
            if (base) {
                t += fmt::format(
                    "{:<20} {:>7} | {:>8.2f} {:>8.2f} {:>7.2f} | {:>8.2f} {:>8.2f} {:>7.2f} | "
                    "{:>+8.2f} {:>+8.2f} {:>+7.2f}\n",
                    name, count, 100 * base->iou, 100 * base->acc, base->cls_acc, 100 * iou,
                    100 * acc, cls, 100 * (iou - base->iou), 100 * (acc - base->acc),
                    cls - base->cls_acc);
            } else {
                t += fmt::format("{:<20} {:>7} | {:>8} {:>8} {:>7} | {:>8.2f} {:>8.2f} {:>7.2f} | "
                                 "{:>8} {:>8} {:>7}\n",
                                 name, count, "-", "-", "-", 100 * iou, 100 * acc, cls, "-", "-", "-");
            }
        } else {
            t += fmt::format("{:<20} {:>7} | {:>8.2f} {:>8.2f} {:>7.2f}\n", name, count, 100 * iou,
                             100 * acc, cls);
        }
    };
    for (auto const& c : report.per_class) {
        row(c.name, std::to_string(c.count), c.iou, c.acc, c.cls_acc,
            baseline ? baseline->find(c.name) : nullptr);
    }
    ClassScore summary_base;
    if (baseline) {
        summary_base = {"mean", 0, baseline->miou, baseline->macc, baseline->mean_cls_acc};
    }
    row("mean", "", report.miou, report.macc, report.mean_cls_acc, baseline ? &summary_base : nullptr);

    auto j = report_json(report);
    if (baseline) {
        j["baseline"] = report_json(*baseline);
        ordered_json delta;
        delta["per_class"] = ordered_json::object();
        for (auto const& c : report.per_class) {
            if (auto const* b = baseline->find(c.name)) {
                delta["per_class"][c.name] = {
                    {"iou", c.iou - b->iou}, {"acc", c.acc - b->acc}, {"cls_acc", c.cls_acc - b->cls_acc}};
            }
        }
        delta["miou"] = report.miou - baseline->miou;
        delta["macc"] = report.macc - baseline->macc;
        delta["mean_cls_acc"] = report.mean_cls_acc - baseline->mean_cls_acc;
        j["delta"] = delta;
    }
    out.json = j.dump(2) + "\n";
    return out;
}

} // namespace segkit
