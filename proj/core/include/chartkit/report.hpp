#ifndef CHARTKIT_REPORT_HPP
#define CHARTKIT_REPORT_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "chartkit/ablation.hpp"
#include "chartkit/evaluation.hpp"

namespace chartkit {

// Outcome of evaluating one song; `error` is set and `result` meaningless
// when ok is false (the run continues past per-song failures).
struct SongEvaluation {
    std::string song_id;
    bool ok = true;
    std::string error;
    OffsetSearchResult result;
};

struct InstrumentAggregate {
    std::size_t gt_events = 0;
    std::size_t pred_events = 0;
    std::size_t matched = 0;
    Prf micro;            // from summed counts across songs
    double macro_f1 = 0.0;  // unweighted mean of per-song F1
    std::size_t songs = 0;  // songs contributing to this instrument
};

struct EvaluationSummary {
    std::vector<SongEvaluation> songs;  // sorted by song_id
    std::map<Instrument, InstrumentAggregate> aggregates;
    std::size_t errors = 0;
};

// Sorts rows by song_id and folds per-instrument counts into micro and
// macro aggregates. Duplicate song ids raise Error.
EvaluationSummary summarize_evaluations(std::vector<SongEvaluation> songs);

// Fixed-width text: instrument aggregate table (F1 / precision / recall /
// macro F1 / ground-truth events) followed by per-song rows and error rows.
std::string render_evaluation_text(const EvaluationSummary& summary);

// Machine form of the same content, stable field order, 2-space indent.
std::string render_evaluation_json(const EvaluationSummary& summary);

struct ScreenRow {
    std::string song_id;
    double statistic = 0.0;
    bool passed = false;
    bool ok = true;      // false when the song could not be screened
    std::string error;
};

struct ScreenSummary {
    std::vector<ScreenRow> rows;  // sorted by song_id
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t errors = 0;
};

ScreenSummary summarize_screen(std::vector<ScreenRow> rows);
std::string render_screen_text(const ScreenSummary& summary);
std::string render_screen_json(const ScreenSummary& summary);

// One line per ablation component: mean delta F1, p-value (printed as
// "<0.001" below a millesimal), better/worse/tie, events changed, and a
// significance mark at p < 0.05.
std::string render_ablation_text(const std::vector<AblationReport>& reports);
std::string render_ablation_json(const std::vector<AblationReport>& reports);

}

#endif
