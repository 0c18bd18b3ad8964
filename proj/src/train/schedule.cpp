#include "sdfkit/train/schedule.hpp"

#include <cmath>
#include <stdexcept>

#include "sdfkit/util/ini.hpp"

namespace sdfkit {

void CurriculumSchedule::validate() const {
    if (stages.empty()) throw std::invalid_argument("schedule: no stages");
    if (total_epochs < 1) throw std::invalid_argument("schedule: total_epochs must be >= 1");
    if (stages.front().epoch_begin != 0)
        throw std::invalid_argument("schedule: first stage must begin at epoch 0");
    if (stages.back().epoch_end != total_epochs)
        throw std::invalid_argument("schedule: last stage must end at total_epochs");
    if (stages.front().residual_fade)
        throw std::invalid_argument("schedule: first stage cannot fade (nothing was grown)");

    const CurriculumStage* prev = nullptr;
    for (const CurriculumStage& st : stages) {
        if (st.epoch_begin >= st.epoch_end)
            throw std::invalid_argument("schedule: stage must span at least one epoch");
        if (st.depth < 2) throw std::invalid_argument("schedule: depth must be >= 2");
        if (st.epsilon < 0.0) throw std::invalid_argument("schedule: epsilon must be >= 0");
        if (st.lambda < 0.0 || st.lambda >= 1.0)
            throw std::invalid_argument("schedule: lambda must lie in [0, 1)");
        if (prev) {
            if (st.epoch_begin != prev->epoch_end)
                throw std::invalid_argument("schedule: stages must tile epochs without gaps");
            int dd = st.depth - prev->depth;
            if (dd < 0) throw std::invalid_argument("schedule: depth must be non-decreasing");
            if (dd > 1)
                throw std::invalid_argument("schedule: depth may grow by at most 1 per stage");
            if ((dd == 1) != st.residual_fade)
                throw std::invalid_argument(
                    "schedule: depth must grow by exactly 1 on residual stages and only there");
            if (st.epsilon > prev->epsilon)
                throw std::invalid_argument("schedule: epsilon must be non-increasing");
            if (st.lambda < prev->lambda)
                throw std::invalid_argument("schedule: lambda must be non-decreasing");
        }
        prev = &st;
    }
}

std::pair<const CurriculumStage*, double> CurriculumSchedule::stage_for_epoch(int epoch) const {
    if (epoch < 0 || epoch >= total_epochs)
        throw std::out_of_range("schedule: epoch " + std::to_string(epoch) + " outside [0, " +
                                std::to_string(total_epochs) + ")");
    for (const CurriculumStage& st : stages) {
        if (epoch < st.epoch_end) {
            double alpha = 1.0;
            if (st.residual_fade)
                alpha = double(epoch - st.epoch_begin) / double(st.epoch_end - st.epoch_begin);
            return {&st, alpha};
        }
    }
    throw std::logic_error("schedule: unreachable");
}

int CurriculumSchedule::stage_index(int epoch) const {
    const CurriculumStage* st = stage_for_epoch(epoch).first;
    return int(st - stages.data());
}

CurriculumSchedule default_schedule(int total_epochs) {
    // depth / residual / epsilon / lambda, with length shares 6 x 10% + 40%
    struct Row {
        int depth;
        bool residual;
        double epsilon, lambda, share;
    };
    static const Row rows[] = {
        {5, false, 0.025, 0.0, 0.1}, {6, true, 0.01, 0.1, 0.1},  {6, false, 0.01, 0.1, 0.1},
        {7, true, 0.0025, 0.2, 0.1}, {7, false, 0.0025, 0.2, 0.1}, {8, true, 0.0, 0.5, 0.1},
        {8, false, 0.0, 0.5, 0.4},
    };
    if (total_epochs < int(std::size(rows)))
        throw std::invalid_argument("schedule: epoch budget smaller than the stage count");

    CurriculumSchedule s;
    s.total_epochs = total_epochs;
    double cum = 0.0;
    int begin = 0;
    for (std::size_t i = 0; i < std::size(rows); ++i) {
        cum += rows[i].share;
        int end = i + 1 == std::size(rows) ? total_epochs
                                           : int(std::llround(cum * double(total_epochs)));
        if (end <= begin) end = begin + 1;  // keep every stage alive on tiny budgets
        if (end > total_epochs) throw std::invalid_argument("schedule: epoch budget too small");
        s.stages.push_back({begin, end, rows[i].depth, rows[i].residual, rows[i].epsilon,
                            rows[i].lambda});
        begin = end;
    }
    s.validate();
    return s;
}

CurriculumSchedule flat_schedule(int total_epochs, int depth, double epsilon, double lambda) {
    CurriculumSchedule s;
    s.total_epochs = total_epochs;
    s.stages.push_back({0, total_epochs, depth, false, epsilon, lambda});
    s.validate();
    return s;
}

CurriculumSchedule scale_schedule(const CurriculumSchedule& s, int new_total_epochs) {
    s.validate();
    if (new_total_epochs < int(s.stages.size()))
        throw std::invalid_argument("schedule: epoch budget smaller than the stage count");
    CurriculumSchedule out;
    out.total_epochs = new_total_epochs;
    double k = double(new_total_epochs) / double(s.total_epochs);
    int begin = 0;
    for (std::size_t i = 0; i < s.stages.size(); ++i) {
        const CurriculumStage& st = s.stages[i];
        int end = i + 1 == s.stages.size() ? new_total_epochs
                                           : int(std::llround(double(st.epoch_end) * k));
        if (end <= begin) end = begin + 1;
        if (end > new_total_epochs) throw std::invalid_argument("schedule: budget too small to scale");
        out.stages.push_back({begin, end, st.depth, st.residual_fade, st.epsilon, st.lambda});
        begin = end;
    }
    out.validate();
    return out;
}

CurriculumSchedule load_schedule(const std::string& path) {
    IniFile f = IniFile::load(path);
    CurriculumSchedule s;
    s.total_epochs = int(f.global.require_int("total_epochs"));
    for (const IniSection* sec : f.sections_named("stage")) {
        CurriculumStage st;
        st.epoch_begin = int(sec->require_int("begin"));
        st.epoch_end = int(sec->require_int("end"));
        st.depth = int(sec->require_int("depth"));
        st.residual_fade = sec->get_bool("residual", false);
        st.epsilon = sec->require_double("epsilon");
        st.lambda = sec->require_double("lambda");
        s.stages.push_back(st);
    }
    try {
        s.validate();
    } catch (const std::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return s;
}

void save_schedule(const CurriculumSchedule& s, const std::string& path) {
    s.validate();
    IniFile f;
    f.global.set("total_epochs", std::to_string(s.total_epochs));
    for (const CurriculumStage& st : s.stages) {
        IniSection& sec = f.add_section("stage");
        sec.set("begin", std::to_string(st.epoch_begin));
        sec.set("end", std::to_string(st.epoch_end));
        sec.set("depth", std::to_string(st.depth));
        sec.set("residual", st.residual_fade ? "true" : "false");
        sec.set("epsilon", format_double(st.epsilon));
        sec.set("lambda", format_double(st.lambda));
    }
    f.save(path);
}

} // namespace sdfkit
