#include "chartkit/report.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "chartkit/errors.hpp"

namespace chartkit {

namespace {

    using ordered_json = nlohmann::ordered_json;

    std::string fixed(double value, int digits)
    {
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
        return buffer;
    }

    std::string metric(double value) { return fixed(value, 3); }

    std::string signed_metric(double value)
    {
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), "%+.3f", value);
        return buffer;
    }

    std::string p_text(double p) { return p < 0.001 ? "<0.001" : fixed(p, 3); }

    bool significant(const AblationReport& report)
    {
        return !report.degenerate && report.p_value < 0.05;
    }

    void append_row(std::string& out, const std::vector<std::string>& cells,
        const std::vector<std::size_t>& widths)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out += cells[i];
            if (i + 1 < cells.size()) {
                out.append(widths[i] > cells[i].size() ? widths[i] - cells[i].size() + 2 : 2,
                    ' ');
            }
        }
        out += '\n';
    }

    std::string render_table(const std::vector<std::vector<std::string>>& rows)
    {
        std::vector<std::size_t> widths;
        for (const auto& row : rows) {
            widths.resize(std::max(widths.size(), row.size()), 0);
            for (std::size_t i = 0; i < row.size(); ++i) {
                widths[i] = std::max(widths[i], row[i].size());
            }
        }
        std::string out;
        for (const auto& row : rows) {
            append_row(out, row, widths);
        }
        return out;
    }

    ordered_json prf_json(const Prf& prf)
    {
        return ordered_json {
            { "precision", prf.precision },
            { "recall", prf.recall },
            { "f1", prf.f1 },
        };
    }

}

EvaluationSummary summarize_evaluations(std::vector<SongEvaluation> songs)
{
    std::sort(songs.begin(), songs.end(),
        [](const SongEvaluation& a, const SongEvaluation& b) {
            return a.song_id < b.song_id;
        });
    for (std::size_t i = 1; i < songs.size(); ++i) {
        if (songs[i].song_id == songs[i - 1].song_id) {
            throw Error("duplicate song_id in evaluation rows: " + songs[i].song_id);
        }
    }

    EvaluationSummary summary;
    std::map<Instrument, double> f1_sums;
    for (const auto& song : songs) {
        if (!song.ok) {
            ++summary.errors;
            continue;
        }
        for (const auto& [instrument, result] : song.result.per_instrument) {
            auto& aggregate = summary.aggregates[instrument];
            aggregate.gt_events += result.gt_count;
            aggregate.pred_events += result.pred_count;
            aggregate.matched += result.matched;
            aggregate.songs += 1;
            f1_sums[instrument] += result.prf.f1;
        }
    }
    for (auto& [instrument, aggregate] : summary.aggregates) {
        aggregate.micro
            = prf_from_match(aggregate.gt_events, aggregate.pred_events, aggregate.matched);
        aggregate.macro_f1
            = aggregate.songs > 0 ? f1_sums[instrument] / aggregate.songs : 0.0;
    }
    summary.songs = std::move(songs);
    return summary;
}

std::string render_evaluation_text(const EvaluationSummary& summary)
{
    std::vector<std::vector<std::string>> aggregate_rows;
    aggregate_rows.push_back(
        { "instrument", "f1", "precision", "recall", "macro_f1", "gt_events" });
    for (const auto& [instrument, aggregate] : summary.aggregates) {
        aggregate_rows.push_back({
            instrument_name(instrument),
            metric(aggregate.micro.f1),
            metric(aggregate.micro.precision),
            metric(aggregate.micro.recall),
            metric(aggregate.macro_f1),
            std::to_string(aggregate.gt_events),
        });
    }

    std::vector<std::vector<std::string>> song_rows;
    std::vector<std::string> header { "song_id", "offset_s" };
    for (const auto& [instrument, aggregate] : summary.aggregates) {
        header.push_back(std::string(instrument_name(instrument)) + "_f1");
    }
    song_rows.push_back(std::move(header));
    for (const auto& song : summary.songs) {
        if (!song.ok) {
            song_rows.push_back({ song.song_id, "ERROR: " + song.error });
            continue;
        }
        std::vector<std::string> row { song.song_id, fixed(song.result.best_offset, 3) };
        for (const auto& [instrument, aggregate] : summary.aggregates) {
            const auto it = song.result.per_instrument.find(instrument);
            row.push_back(it == song.result.per_instrument.end()
                    ? std::string("-")
                    : metric(it->second.prf.f1));
        }
        song_rows.push_back(std::move(row));
    }

    std::string out = render_table(aggregate_rows);
    out += '\n';
    out += render_table(song_rows);
    out += '\n';
    out += "songs " + std::to_string(summary.songs.size()) + ", errors "
        + std::to_string(summary.errors) + "\n";
    return out;
}

std::string render_evaluation_json(const EvaluationSummary& summary)
{
    ordered_json root;
    root["songs"] = ordered_json::array();
    for (const auto& song : summary.songs) {
        ordered_json row;
        row["song_id"] = song.song_id;
        row["ok"] = song.ok;
        if (!song.ok) {
            row["error"] = song.error;
        } else {
            row["offset"] = song.result.best_offset;
            ordered_json instruments;
            for (const auto& [instrument, result] : song.result.per_instrument) {
                ordered_json entry = prf_json(result.prf);
                entry["lane_accuracy"] = result.lane_accuracy;
                entry["gt_events"] = result.gt_count;
                entry["pred_events"] = result.pred_count;
                entry["matched"] = result.matched;
                instruments[instrument_name(instrument)] = std::move(entry);
            }
            row["instruments"] = std::move(instruments);
        }
        root["songs"].push_back(std::move(row));
    }

    ordered_json aggregates;
    for (const auto& [instrument, aggregate] : summary.aggregates) {
        ordered_json entry;
        entry["micro"] = prf_json(aggregate.micro);
        entry["macro_f1"] = aggregate.macro_f1;
        entry["gt_events"] = aggregate.gt_events;
        entry["pred_events"] = aggregate.pred_events;
        entry["matched"] = aggregate.matched;
        entry["songs"] = aggregate.songs;
        aggregates[instrument_name(instrument)] = std::move(entry);
    }
    root["aggregate"] = std::move(aggregates);
    root["errors"] = summary.errors;
    return root.dump(2) + "\n";
}

ScreenSummary summarize_screen(std::vector<ScreenRow> rows)
{
    std::sort(rows.begin(), rows.end(),
        [](const ScreenRow& a, const ScreenRow& b) { return a.song_id < b.song_id; });
    ScreenSummary summary;
    for (const auto& row : rows) {
        if (!row.ok) {
            ++summary.errors;
        } else if (row.passed) {
            ++summary.passed;
        } else {
            ++summary.failed;
        }
    }
    summary.rows = std::move(rows);
    return summary;
}

std::string render_screen_text(const ScreenSummary& summary)
{
    std::vector<std::vector<std::string>> rows;
    rows.push_back({ "song_id", "statistic", "result" });
    for (const auto& row : summary.rows) {
        if (!row.ok) {
            rows.push_back({ row.song_id, "-", "ERROR: " + row.error });
        } else {
            rows.push_back({ row.song_id, fixed(row.statistic, 6),
                row.passed ? "pass" : "fail" });
        }
    }
    std::string out = render_table(rows);
    out += '\n';
    out += "passed " + std::to_string(summary.passed) + " of "
        + std::to_string(summary.passed + summary.failed) + " (failed "
        + std::to_string(summary.failed) + ", errors "
        + std::to_string(summary.errors) + ")\n";
    return out;
}

std::string render_screen_json(const ScreenSummary& summary)
{
    ordered_json root;
    root["songs"] = ordered_json::array();
    for (const auto& row : summary.rows) {
        ordered_json entry;
        entry["song_id"] = row.song_id;
        entry["ok"] = row.ok;
        if (!row.ok) {
            entry["error"] = row.error;
        } else {
            entry["statistic"] = row.statistic;
            entry["passed"] = row.passed;
        }
        root["songs"].push_back(std::move(entry));
    }
    root["passed"] = summary.passed;
    root["failed"] = summary.failed;
    root["errors"] = summary.errors;
    return root.dump(2) + "\n";
}

std::string render_ablation_text(const std::vector<AblationReport>& reports)
{
    std::vector<std::vector<std::string>> rows;
    rows.push_back(
        { "component", "delta_f1", "p", "B/W/T", "events_changed", "sig" });
    for (const auto& report : reports) {
        rows.push_back({
            report.component,
            signed_metric(report.delta_f1_mean),
            p_text(report.p_value),
            std::to_string(report.better) + "/" + std::to_string(report.worse) + "/"
                + std::to_string(report.ties),
            std::to_string(report.events_changed),
            significant(report) ? "*" : "",
        });
    }
    return render_table(rows);
}

std::string render_ablation_json(const std::vector<AblationReport>& reports)
{
    ordered_json root = ordered_json::array();
    for (const auto& report : reports) {
        ordered_json row;
        row["component"] = report.component;
        row["delta_f1_mean"] = report.delta_f1_mean;
        row["p_value"] = report.p_value;
        row["degenerate"] = report.degenerate;
        row["better"] = report.better;
        row["worse"] = report.worse;
        row["ties"] = report.ties;
        row["events_changed"] = report.events_changed;
        row["songs"] = report.songs;
        row["significant"] = significant(report);
        row["per_song_delta"] = report.per_song_delta;
        root.push_back(std::move(row));
    }
    return root.dump(2) + "\n";
}

}
