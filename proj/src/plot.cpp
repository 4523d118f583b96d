#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spgp/harness.hpp"

namespace spgp {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#17becf", "#e377c2", "#7f7f7f", "#bcbd22"};

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

struct Bounds {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    void add(const Vec2& p) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
};

}  // namespace

void emit_plot(const TrajectoryLog& log, const std::string& path) {
    if (log.steps.empty() || log.agent_count() == 0) {
        throw std::invalid_argument("emit_plot: empty trajectory log");
    }

    Bounds b;
    for (const Obstacle& o : log.obstacles) {
        b.add(o.center + Vec2{o.radius, o.radius});
        b.add(o.center - Vec2{o.radius, o.radius});
    }
    for (const StepRecord& r : log.steps) {
        for (const Vec2& p : r.positions) b.add(p);
    }
    for (const Vec2& g : log.original_goals) b.add(g);
    const double pad = 0.5;
    b.xmin -= pad; b.ymin -= pad; b.xmax += pad; b.ymax += pad;

    const double width = 800.0;
    const double scale = width / (b.xmax - b.xmin);
    const double height = (b.ymax - b.ymin) * scale;
    const auto X = [&](double x) { return (x - b.xmin) * scale; };
    const auto Y = [&](double y) { return height - (y - b.ymin) * scale; };  // y up

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt2(width)
        << "\" height=\"" << fmt2(height) << "\" viewBox=\"0 0 " << fmt2(width) << ' '
        << fmt2(height) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (const Obstacle& o : log.obstacles) {
        svg << "<circle cx=\"" << fmt2(X(o.center.x)) << "\" cy=\"" << fmt2(Y(o.center.y))
            << "\" r=\"" << fmt2(o.radius * scale) << "\" fill=\"#9a9a9a\"/>\n";
    }

    for (std::size_t i = 0; i < log.agent_count(); ++i) {
        const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const StepRecord& r : log.steps) {
            svg << fmt2(X(r.positions[i].x)) << ',' << fmt2(Y(r.positions[i].y)) << ' ';
        }
        svg << "\"/>\n";
        const Vec2 start = log.steps.front().positions[i];
        const Vec2 goal = log.original_goals[i];
        svg << "<circle cx=\"" << fmt2(X(start.x)) << "\" cy=\"" << fmt2(Y(start.y))
            << "\" r=\"5\" fill=\"" << color << "\"/>\n";
        svg << "<path d=\"M" << fmt2(X(goal.x) - 5) << ' ' << fmt2(Y(goal.y) - 5) << " L"
            << fmt2(X(goal.x) + 5) << ' ' << fmt2(Y(goal.y) + 5) << " M"
            << fmt2(X(goal.x) - 5) << ' ' << fmt2(Y(goal.y) + 5) << " L"
            << fmt2(X(goal.x) + 5) << ' ' << fmt2(Y(goal.y) - 5) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
    }

    for (const SimEvent& e : log.events) {
        if (e.type != SimEvent::Type::PerturbStarted) continue;
        const char* color = kPalette[e.agent % 10];
        const double cx = X(e.point.x), cy = Y(e.point.y);
        svg << "<path d=\"M" << fmt2(cx) << ' ' << fmt2(cy - 6) << " L" << fmt2(cx + 6) << ' '
            << fmt2(cy) << " L" << fmt2(cx) << ' ' << fmt2(cy + 6) << " L" << fmt2(cx - 6)
            << ' ' << fmt2(cy) << " Z\" fill=\"none\" stroke=\"" << color << "\"/>\n";
    }

    svg << "</svg>\n";
    write_file(path, svg.str());
}

void emit_plot(const SweepResult& sweep, const std::string& path) {
    if (sweep.points.empty()) {
        throw std::invalid_argument("emit_plot: empty sweep");
    }
    const double width = 640.0, height = 480.0;
    const double ml = 70.0, mr = 20.0, mt = 20.0, mb = 50.0;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const SweepPoint& p : sweep.points) {
        xmin = std::min(xmin, p.delta);
        xmax = std::max(xmax, p.delta);
        ymin = std::min(ymin, p.mean_makespan);
        ymax = std::max(ymax, p.mean_makespan);
    }
    if (xmax == xmin) { xmax += 1.0; xmin -= 1.0; }
    if (ymax == ymin) { ymax += 1.0; ymin -= 1.0; }
    const double ypad = 0.08 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    const auto Y = [&](double y) {
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<line x1=\"" << fmt2(ml) << "\" y1=\"" << fmt2(height - mb) << "\" x2=\""
        << fmt2(width - mr) << "\" y2=\"" << fmt2(height - mb)
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << fmt2(ml) << "\" y1=\"" << fmt2(mt) << "\" x2=\"" << fmt2(ml)
        << "\" y2=\"" << fmt2(height - mb) << "\" stroke=\"black\"/>\n";

    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (const SweepPoint& p : sweep.points) {
        svg << fmt2(X(p.delta)) << ',' << fmt2(Y(p.mean_makespan)) << ' ';
    }
    svg << "\"/>\n";
    for (const SweepPoint& p : sweep.points) {
        svg << "<circle cx=\"" << fmt2(X(p.delta)) << "\" cy=\"" << fmt2(Y(p.mean_makespan))
            << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
        svg << "<text x=\"" << fmt2(X(p.delta)) << "\" y=\"" << fmt2(height - mb + 20)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt2(p.delta) << "</text>\n";
        svg << "<text x=\"" << fmt2(X(p.delta)) << "\" y=\"" << fmt2(Y(p.mean_makespan) - 8)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt2(p.mean_makespan)
            << "</text>\n";
    }
    svg << "<text x=\"" << fmt2((ml + width - mr) / 2) << "\" y=\"" << fmt2(height - 12)
        << "\" font-size=\"13\" text-anchor=\"middle\">perturbation radius (m)</text>\n";
    svg << "<text x=\"16\" y=\"" << fmt2((mt + height - mb) / 2)
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << fmt2((mt + height - mb) / 2) << ")\">mean makespan (steps)</text>\n";
    svg << "</svg>\n";
    write_file(path, svg.str());
}

}  // namespace spgp
