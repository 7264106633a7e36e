#include "xray/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace xray {

std::string history_csv(const std::vector<RunHistory>& folds) {
    std::ostringstream os;
    os << std::setprecision(10);
    os << "fold,epoch,train_loss,train_acc,val_loss,val_acc\n";
    for (std::size_t f = 0; f < folds.size(); ++f) {
        for (std::size_t e = 0; e < folds[f].size(); ++e) {
            const auto& h = folds[f][e];
            os << f << ',' << e + 1 << ',' << h.train_loss << ',' << h.train_accuracy << ',' << h.val_loss << ','
               << h.val_accuracy << '\n';
        }
    }
    return os.str();
}

namespace {

constexpr double width = 640, height = 400;
constexpr double left = 60, right = 20, top = 40, bottom = 50;
constexpr const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string curves_svg(const std::vector<RunHistory>& folds, CurveKind kind) {
    const bool is_loss = kind == CurveKind::loss;
    auto value = [&](const EpochRecord& r) { return is_loss ? r.train_loss : r.train_accuracy; };

    std::size_t epochs = 1;
    double y_max = is_loss ? 0.0 : 1.0;
    for (const auto& h : folds) {
        epochs = std::max(epochs, h.size());
        for (const auto& r : h) y_max = std::max(y_max, value(r));
    }
    if (y_max <= 0.0) y_max = 1.0;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    auto px = [&](std::size_t epoch) {
        return left + (epochs > 1 ? plot_w * static_cast<double>(epoch - 1) / static_cast<double>(epochs - 1) : 0.0);
    };
    auto py = [&](double v) { return top + plot_h * (1.0 - v / y_max); };

    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << ' ' << height << "\" width=\""
       << width << "\" height=\"" << height << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
       << (is_loss ? "Training loss" : "Training accuracy") << " per fold</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
       << top + plot_h << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\" "
       << "font-size=\"13\">epoch</text>\n";
    os << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
       << "transform=\"rotate(-90 16 " << top + plot_h / 2 << ")\">" << (is_loss ? "loss" : "accuracy")
       << "</text>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = y_max * t / 4.0;
        os << "<text x=\"" << left - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
           << std::setprecision(3) << v << std::setprecision(2) << "</text>\n";
    }
    os << "<text x=\"" << left << "\" y=\"" << top + plot_h + 16 << "\" text-anchor=\"middle\" font-size=\"11\">1</text>\n";
    os << "<text x=\"" << left + plot_w << "\" y=\"" << top + plot_h + 16
       << "\" text-anchor=\"middle\" font-size=\"11\">" << epochs << "</text>\n";

    for (std::size_t f = 0; f < folds.size(); ++f) {
        os << "<polyline fill=\"none\" stroke=\"" << palette[f % std::size(palette)]
           << "\" stroke-width=\"1.5\" data-fold=\"" << f << "\" points=\"";
        for (std::size_t e = 0; e < folds[f].size(); ++e) {
            if (e) os << ' ';
            os << px(e + 1) << ',' << py(value(folds[f][e]));
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace xray
