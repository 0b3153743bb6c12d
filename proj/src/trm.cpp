#include "macfe/trm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "macfe/error.hpp"
#include "macfe/parallel.hpp"
#include "macfe/scaler.hpp"
#include "macfe/stats.hpp"

namespace macfe {

namespace {

constexpr std::string_view kMagic = "MACFE-TRM";
constexpr int kFormatVersion = 1;

std::string escape_token(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == ' ' || c == '%' || c == '\n' || c == '\r' || c == ';') {
            static const char* hex = "0123456789abcdef";
            out += '%';
            out += hex[(static_cast<unsigned char>(c) >> 4) & 0xf];
            out += hex[static_cast<unsigned char>(c) & 0xf];
        } else {
            out += c;
        }
    }
    return out;
}

std::string unescape_token(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            const auto hexval = [](char c) -> int {
                if (c >= '0' && c <= '9') return c - '0';
                if (c >= 'a' && c <= 'f') return c - 'a' + 10;
                return -1;
            };
            const int hi = hexval(s[i + 1]);
            const int lo = hexval(s[i + 2]);
            if (hi < 0 || lo < 0) {
                raise(Errc::corrupt_file, "bad escape sequence in token");
            }
            out += static_cast<char>(hi * 16 + lo);
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

bool all_zero(std::span<const double> v) {
    for (double x : v) {
        if (x != 0.0) return false;
    }
    return true;
}

struct DatasetWork {
    std::vector<TrmRecord> records;
    TrmRecord scaler;
};

}  // namespace

std::size_t Trm::count(TransformKind kind) const {
    std::size_t c = 0;
    for (const auto& r : records) {
        if (r.kind == kind) c++;
    }
    return c;
}

std::string make_fingerprint(int bins) {
    return "p=" + std::to_string(kMetaFeatureCount) + ";s=" + std::to_string(bins) +
           ";registry=" + std::string(registry_version());
}

// Normalizes one encoding component-wise by the stored (min,max), clipping to
// [0,1]; components that were constant across the training corpus map to 0.
static std::vector<double> normalize_encoding(const Trm& trm, std::span<const double> enc) {
    std::vector<double> out(enc.size());
    for (std::size_t i = 0; i < enc.size(); ++i) {
        const auto [lo, hi] = trm.norm_stats[i];
        out[i] = hi > lo ? std::clamp((enc[i] - lo) / (hi - lo), 0.0, 1.0) : 0.0;
    }
    return out;
}

Trm train_trm(const std::vector<Dataset>& corpus, const TrmTrainConfig& cfg) {
    if (corpus.empty()) {
        raise(Errc::empty_corpus, "training corpus is empty");
    }
    for (const auto& d : corpus) {
        if (!d.preprocessed) {
            raise(Errc::invalid_argument, "corpus dataset '" + d.name + "' is not preprocessed");
        }
    }

    std::vector<DatasetWork> work(corpus.size());
    parallel_for(corpus.size(), cfg.threads, [&](std::size_t di) {
        const Dataset& d = corpus[di];
        const std::size_t f = d.n_features();
        const MetaFeatureVector mf = extract_meta_features(d);

        std::vector<FeatureEncoding> enc(f);
        std::vector<double> raw_mic(f);
        for (std::size_t j = 0; j < f; ++j) {
            enc[j] = encode_feature(mf, d.x[j], d.name, d.columns[j].name, cfg.bins);
            raw_mic[j] = mic(d.x[j], std::span<const int>(d.y), cfg.mic);
        }

        auto& out = work[di];
        for (std::size_t j = 0; j < f; ++j) {
            // top unary transform; ties keep the earliest registry entry
            double best_gain = -std::numeric_limits<double>::infinity();
            std::string winner;
            for (const auto& name : unary_names()) {
                const auto t = make_transform(TransformKind::unary, name);
                const auto candidate = apply_unary(t, d.x[j]);
                const double gain =
                    mic(candidate, std::span<const int>(d.y), cfg.mic) - raw_mic[j];
                if (gain > best_gain) {
                    best_gain = gain;
                    winner = t.name;
                }
            }
            if (best_gain > 0.0) {
                TrmRecord rec;
                rec.kind = TransformKind::unary;
                rec.enc_a = enc[j].values;
                rec.transform = make_transform(TransformKind::unary, winner);
                rec.gain_a = best_gain;
                rec.source = d.name + "/" + d.columns[j].name;
                out.records.push_back(std::move(rec));
            }
        }

        for (std::size_t i = 0; i < f; ++i) {
            for (std::size_t j = i + 1; j < f; ++j) {
                for (const auto& name : binary_names()) {
                    const auto t = make_transform(TransformKind::binary, name);
                    const auto candidate = apply_binary(t, d.x[i], d.x[j]);
                    const double score = mic(candidate, std::span<const int>(d.y), cfg.mic);
                    const double gain_i = score - raw_mic[i];
                    const double gain_j = score - raw_mic[j];
                    if (gain_i > 0.0 && gain_j > 0.0) {
                        TrmRecord rec;
                        rec.kind = TransformKind::binary;
                        rec.enc_a = enc[i].values;
                        rec.enc_b = enc[j].values;
                        rec.transform = t;
                        rec.gain_a = gain_i;
                        rec.gain_b = gain_j;
                        rec.source = d.name + "/" + d.columns[i].name + "+" +
                                     d.columns[j].name + "/" + t.name;
                        out.records.push_back(std::move(rec));
                    }
                }
            }
        }

        const ScalerDecision decision = recommend_scaler(d, cfg.gamma);
        out.scaler.kind = TransformKind::scaler;
        const DatasetEncoding de = encode_dataset(d);
        out.scaler.enc_a.assign(de.values.begin(), de.values.end());
        out.scaler.transform = decision.choice;
        out.scaler.source = d.name;
    });

    Trm trm;
    trm.bins = cfg.bins;
    trm.fingerprint = make_fingerprint(cfg.bins);
    for (auto& w : work) {
        for (auto& r : w.records) trm.records.push_back(std::move(r));
        trm.records.push_back(std::move(w.scaler));
    }
    // canonical record order: provenance, then kind, then transform token
    std::stable_sort(trm.records.begin(), trm.records.end(),
                     [](const TrmRecord& a, const TrmRecord& b) {
                         if (a.source != b.source) return a.source < b.source;
                         if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                         return a.transform.name < b.transform.name;
                     });

    const std::size_t eta = kMetaFeatureCount + static_cast<std::size_t>(cfg.bins);
    trm.norm_stats.assign(eta, {std::numeric_limits<double>::infinity(),
                                -std::numeric_limits<double>::infinity()});
    const auto feed = [&trm](std::span<const double> enc) {
        for (std::size_t i = 0; i < enc.size(); ++i) {
            trm.norm_stats[i].first = std::min(trm.norm_stats[i].first, enc[i]);
            trm.norm_stats[i].second = std::max(trm.norm_stats[i].second, enc[i]);
        }
    };
    for (const auto& r : trm.records) {
        feed(r.enc_a);
        if (r.kind == TransformKind::binary) feed(r.enc_b);
    }
    for (auto& [lo, hi] : trm.norm_stats) {
        if (!(hi >= lo)) {  // component never observed
            lo = 0.0;
            hi = 0.0;
        }
    }
    return trm;
}

namespace {

void check_compatible(const Trm& trm, const FeatureEncoding& e) {
    if (trm.records.empty()) {
        raise(Errc::empty_trm, "TRM has no records");
    }
    const std::size_t eta = kMetaFeatureCount + static_cast<std::size_t>(trm.bins);
    if (e.histogram_bins != trm.bins || e.values.size() != eta) {
        raise(Errc::config_mismatch,
              "encoding produced with s=" + std::to_string(e.histogram_bins) +
                  ", TRM trained with s=" + std::to_string(trm.bins));
    }
}

}  // namespace

std::optional<UnaryHit> lookup_unary(const Trm& trm, const FeatureEncoding& e, double tau) {
    check_compatible(trm, e);
    const auto query = normalize_encoding(trm, e.values);
    if (all_zero(query)) return std::nullopt;

    std::optional<UnaryHit> best;
    for (std::size_t i = 0; i < trm.records.size(); ++i) {
        const auto& rec = trm.records[i];
        if (rec.kind != TransformKind::unary) continue;
        const double sim = cosine(query, normalize_encoding(trm, rec.enc_a));
        if (!best || sim > best->similarity) {
            best = UnaryHit{rec.transform, sim, i};
        }
    }
    if (!best || best->similarity < tau) return std::nullopt;
    return best;
}

std::optional<BinaryHit> lookup_binary(const Trm& trm, const FeatureEncoding& e_i,
                                       const FeatureEncoding& e_j, double tau) {
    check_compatible(trm, e_i);
    check_compatible(trm, e_j);
    const auto qi = normalize_encoding(trm, e_i.values);
    const auto qj = normalize_encoding(trm, e_j.values);
    if (all_zero(qi) && all_zero(qj)) return std::nullopt;

    std::vector<double> fwd(qi.size() + qj.size());
    std::vector<double> rev(qi.size() + qj.size());
    std::copy(qj.begin(), qj.end(), std::copy(qi.begin(), qi.end(), fwd.begin()));
    std::copy(qi.begin(), qi.end(), std::copy(qj.begin(), qj.end(), rev.begin()));

    std::optional<BinaryHit> best;
    std::vector<double> stored(fwd.size());
    for (std::size_t i = 0; i < trm.records.size(); ++i) {
        const auto& rec = trm.records[i];
        if (rec.kind != TransformKind::binary) continue;
        const auto na = normalize_encoding(trm, rec.enc_a);
        const auto nb = normalize_encoding(trm, rec.enc_b);
        std::copy(nb.begin(), nb.end(), std::copy(na.begin(), na.end(), stored.begin()));
        const double sim_fwd = cosine(fwd, stored);
        const double sim_rev = cosine(rev, stored);
        const bool swapped = sim_rev > sim_fwd;
        const double sim = swapped ? sim_rev : sim_fwd;
        if (!best || sim > best->similarity) {
            best = BinaryHit{rec.transform, swapped, sim, i};
        }
    }
    if (!best || best->similarity < tau) return std::nullopt;
    return best;
}

TransformId lookup_scaler(const Trm& trm, const DatasetEncoding& de) {
    std::vector<double> query(de.values.begin(), de.values.end());
    std::vector<double> norm_query(query.size());
    for (std::size_t i = 0; i < query.size(); ++i) {
        const auto [lo, hi] = trm.norm_stats.empty()
                                  ? std::pair<double, double>{0.0, 0.0}
                                  : trm.norm_stats[i];
        norm_query[i] = hi > lo ? std::clamp((query[i] - lo) / (hi - lo), 0.0, 1.0) : 0.0;
    }
    const TrmRecord* best = nullptr;
    double best_sim = -1.0;
    for (const auto& rec : trm.records) {
        if (rec.kind != TransformKind::scaler) continue;
        std::vector<double> stored(rec.enc_a.size());
        for (std::size_t i = 0; i < stored.size(); ++i) {
            const auto [lo, hi] = trm.norm_stats[i];
            stored[i] = hi > lo ? std::clamp((rec.enc_a[i] - lo) / (hi - lo), 0.0, 1.0) : 0.0;
        }
        const double sim = cosine(norm_query, stored);
        if (best == nullptr || sim > best_sim) {
            best = &rec;
            best_sim = sim;
        }
    }
    if (best == nullptr) {
        raise(Errc::empty_trm, "TRM has no scaler records");
    }
    return best->transform;
}

// ---- persistence ----

namespace {

void append_doubles(std::string& line, std::span<const double> values) {
    for (double v : values) {
        line += ' ';
        line += format_double(v);
    }
}

std::string record_line(const TrmRecord& r) {
    std::string line;
    switch (r.kind) {
        case TransformKind::unary:
            line = "U " + escape_token(r.source) + " " + r.transform.name + " " +
                   format_double(r.gain_a);
            append_doubles(line, r.enc_a);
            break;
        case TransformKind::binary:
            line = "B " + escape_token(r.source) + " " + r.transform.name + " " +
                   format_double(r.gain_a) + " " + format_double(r.gain_b);
            append_doubles(line, r.enc_a);
            line += " ;";
            append_doubles(line, r.enc_b);
            break;
        case TransformKind::scaler:
            line = "S " + escape_token(r.source) + " " + r.transform.name;
            append_doubles(line, r.enc_a);
            break;
    }
    return line;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream is(line);
    std::string t;
    while (is >> t) tokens.push_back(t);
    return tokens;
}

}  // namespace

void save_trm(const Trm& trm, const std::filesystem::path& path) {
    std::string body;
    for (const auto& r : trm.records) {
        body += record_line(r);
        body += '\n';
    }

    std::ostringstream head;
    head << kMagic << " v" << kFormatVersion << "\n";
    head << "fingerprint " << trm.fingerprint << "\n";
    head << "p " << kMetaFeatureCount << "\n";
    head << "s " << trm.bins << "\n";
    head << "meta_names";
    for (const auto& name : meta_feature_names()) head << ' ' << name;
    head << "\n";
    head << "norm_stats " << trm.norm_stats.size();
    for (const auto& [lo, hi] : trm.norm_stats) {
        head << ' ' << format_double(lo) << ' ' << format_double(hi);
    }
    head << "\n";
    head << "records " << trm.records.size() << "\n";
    char checksum[32];
    std::snprintf(checksum, sizeof(checksum), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(body)));
    head << "checksum " << checksum << "\n";

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        raise(Errc::io_error, "cannot write '" + path.string() + "'");
    }
    out << head.str() << body;
    out.flush();
    if (!out) {
        raise(Errc::io_error, "write failed for '" + path.string() + "'");
    }
}

Trm load_trm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(Errc::io_error, "cannot open '" + path.string() + "'");
    }
    std::string line;

    const auto next_line = [&](const char* what) -> std::string {
        if (!std::getline(in, line)) {
            raise(Errc::corrupt_file, std::string("truncated file: missing ") + what);
        }
        return line;
    };

    {
        const std::string magic = next_line("magic");
        const std::string expected = std::string(kMagic) + " v" + std::to_string(kFormatVersion);
        if (magic != expected) {
            if (magic.rfind(kMagic, 0) == 0) {
                raise(Errc::version_mismatch, "unsupported TRM format '" + magic + "'");
            }
            raise(Errc::corrupt_file, "not a TRM file");
        }
    }

    Trm trm;
    auto tokens = split_ws(next_line("fingerprint"));
    if (tokens.size() != 2 || tokens[0] != "fingerprint") {
        raise(Errc::corrupt_file, "bad fingerprint line");
    }
    trm.fingerprint = tokens[1];

    tokens = split_ws(next_line("p"));
    if (tokens.size() != 2 || tokens[0] != "p" ||
        tokens[1] != std::to_string(kMetaFeatureCount)) {
        raise(Errc::version_mismatch, "meta-feature count mismatch");
    }

    tokens = split_ws(next_line("s"));
    if (tokens.size() != 2 || tokens[0] != "s") {
        raise(Errc::corrupt_file, "bad bin-count line");
    }
    trm.bins = static_cast<int>(parse_double_strict(tokens[1]));
    if (trm.bins < 2) {
        raise(Errc::corrupt_file, "bad bin count");
    }

    tokens = split_ws(next_line("meta_names"));
    if (tokens.size() != kMetaFeatureCount + 1 || tokens[0] != "meta_names") {
        raise(Errc::corrupt_file, "bad meta-name line");
    }
    for (std::size_t i = 0; i < kMetaFeatureCount; ++i) {
        if (tokens[i + 1] != meta_feature_names()[i]) {
            raise(Errc::version_mismatch,
                  "meta-feature order mismatch at '" + tokens[i + 1] + "'");
        }
    }

    tokens = split_ws(next_line("norm_stats"));
    if (tokens.size() < 2 || tokens[0] != "norm_stats") {
        raise(Errc::corrupt_file, "bad norm_stats line");
    }
    const std::size_t stat_count = static_cast<std::size_t>(parse_double_strict(tokens[1]));
    if (tokens.size() != 2 + 2 * stat_count) {
        raise(Errc::corrupt_file, "norm_stats count does not match payload");
    }
    if (stat_count != kMetaFeatureCount + static_cast<std::size_t>(trm.bins)) {
        raise(Errc::corrupt_file, "norm_stats length inconsistent with bin count");
    }
    trm.norm_stats.reserve(stat_count);
    for (std::size_t i = 0; i < stat_count; ++i) {
        trm.norm_stats.emplace_back(parse_double_strict(tokens[2 + 2 * i]),
                                    parse_double_strict(tokens[3 + 2 * i]));
    }

    tokens = split_ws(next_line("records"));
    if (tokens.size() != 2 || tokens[0] != "records") {
        raise(Errc::corrupt_file, "bad record-count line");
    }
    const std::size_t record_count = static_cast<std::size_t>(parse_double_strict(tokens[1]));

    tokens = split_ws(next_line("checksum"));
    if (tokens.size() != 2 || tokens[0] != "checksum") {
        raise(Errc::corrupt_file, "bad checksum line");
    }
    const std::string stored_checksum = tokens[1];

    std::string body;
    {
        std::ostringstream rest;
        rest << in.rdbuf();
        body = rest.str();
    }
    char computed[32];
    std::snprintf(computed, sizeof(computed), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(body)));
    if (stored_checksum != computed) {
        raise(Errc::corrupt_file, "checksum mismatch");
    }

    const std::size_t eta = kMetaFeatureCount + static_cast<std::size_t>(trm.bins);
    std::istringstream body_in(body);
    while (std::getline(body_in, line)) {
        if (line.empty()) continue;
        tokens = split_ws(line);
        TrmRecord rec;
        std::size_t fixed = 0;
        std::size_t enc_len = eta;
        if (tokens[0] == "U") {
            rec.kind = TransformKind::unary;
            fixed = 4;  // U source transform gain
        } else if (tokens[0] == "B") {
            rec.kind = TransformKind::binary;
            fixed = 5;  // B source transform gain_a gain_b
        } else if (tokens[0] == "S") {
            rec.kind = TransformKind::scaler;
            fixed = 3;  // S source transform
            enc_len = kMetaFeatureCount;
        } else {
            raise(Errc::corrupt_file, "unknown record tag '" + tokens[0] + "'");
        }
        const std::size_t expected =
            fixed + enc_len + (rec.kind == TransformKind::binary ? 1 + eta : 0);
        if (tokens.size() != expected) {
            raise(Errc::corrupt_file, "record has " + std::to_string(tokens.size()) +
                                          " fields, expected " + std::to_string(expected));
        }
        rec.source = unescape_token(tokens[1]);
        const TransformKind kind = rec.kind;
        rec.transform = make_transform(kind, tokens[2]);
        std::size_t at = 3;
        if (kind != TransformKind::scaler) rec.gain_a = parse_double_strict(tokens[at++]);
        if (kind == TransformKind::binary) rec.gain_b = parse_double_strict(tokens[at++]);
        rec.enc_a.reserve(enc_len);
        for (std::size_t i = 0; i < enc_len; ++i) {
            rec.enc_a.push_back(parse_double_strict(tokens[at++]));
        }
        if (kind == TransformKind::binary) {
            if (tokens[at] != ";") {
                raise(Errc::corrupt_file, "binary record missing encoding separator");
            }
            at++;
            rec.enc_b.reserve(eta);
            for (std::size_t i = 0; i < eta; ++i) {
                rec.enc_b.push_back(parse_double_strict(tokens[at++]));
            }
        }
        trm.records.push_back(std::move(rec));
    }
    if (trm.records.size() != record_count) {
        raise(Errc::corrupt_file, "record count mismatch: header says " +
                                      std::to_string(record_count) + ", body has " +
                                      std::to_string(trm.records.size()));
    }
    return trm;
}

}  // namespace macfe
