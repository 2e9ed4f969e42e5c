#include "loopsim/timetags.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "loopsim/rng.hpp"

namespace loopsim {

namespace {

constexpr char kMagic[8] = {'L', 'O', 'O', 'P', 'T', 'A', 'G', 'S'};
constexpr uint32_t kVersion = 1;

int64_t floor_div(int64_t value, int64_t divisor) {
    int64_t q = value / divisor;
    if ((value % divisor) < 0) --q;
    return q;
}

struct FrameGeometry {
    int64_t tau_ps = 0;
    int64_t period_ps = 0;
    int modes = 0;
};

FrameGeometry geometry(const ExperimentSpec& spec) {
    FrameGeometry g;
    g.tau_ps = std::llround(spec.schedule.bin_period_ns * 1000.0);
    g.period_ps = std::llround(spec.sequence_period_ns * 1000.0);
    g.modes = spec.schedule.m;
    if (g.tau_ps <= 0 || g.period_ps <= 0) {
        throw std::invalid_argument("timetags: bin and sequence periods must be positive");
    }
    return g;
}

}  // namespace

bool TagStream::is_sorted() const {
    return std::is_sorted(tags.begin(), tags.end(),
                          [](const TimeTag& a, const TimeTag& b) {
                              return a.timestamp_ps < b.timestamp_ps;
                          });
}

std::vector<Pattern> draw_outcomes(const PhotonDistribution& dist, int frames,
                                   uint64_t seed) {
    if (frames < 0) throw std::invalid_argument("draw_outcomes: frames must be >= 0");
    dist.validate();
    std::vector<double> cumulative(dist.probabilities.size());
    double acc = 0.0;
    for (size_t i = 0; i < cumulative.size(); ++i) {
        acc += dist.probabilities[i];
        cumulative[i] = acc;
    }
    std::vector<Pattern> out;
    out.reserve(frames);
    for (int f = 0; f < frames; ++f) {
        rng::Stream stream(seed, "frame", static_cast<uint64_t>(f));
        const double u = stream.next_double() * acc;
        size_t idx = std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                     cumulative.begin();
        if (idx >= dist.support.size()) idx = dist.support.size() - 1;
        out.push_back(dist.support[idx]);
    }
    return out;
}

TagStream synthesize_stream(const PhotonDistribution& dist, const ExperimentSpec& spec,
                            double detector_efficiency, double jitter_sigma_ps,
                            int frames, uint64_t seed) {
    spec.validate();
    dist.validate();
    if (dist.modes != spec.schedule.m) {
        throw std::invalid_argument("synthesize_stream: distribution modes must match schedule");
    }
    if (!(detector_efficiency > 0.0 && detector_efficiency <= 1.0)) {
        throw std::invalid_argument("synthesize_stream: efficiency must lie in (0,1]");
    }
    if (jitter_sigma_ps < 0.0) {
        throw std::invalid_argument("synthesize_stream: jitter must be >= 0");
    }
    if (frames < 0) throw std::invalid_argument("synthesize_stream: frames must be >= 0");

    const FrameGeometry g = geometry(spec);

    std::vector<double> cumulative(dist.probabilities.size());
    double acc = 0.0;
    for (size_t i = 0; i < cumulative.size(); ++i) {
        acc += dist.probabilities[i];
        cumulative[i] = acc;
    }

    TagStream stream;
    stream.origin = StreamOrigin::synthetic;
    stream.tags.reserve(static_cast<size_t>(frames) * dist.photons);
    for (int f = 0; f < frames; ++f) {
        rng::Stream rs(seed, "frame", static_cast<uint64_t>(f));
        const double u = rs.next_double() * acc;
        size_t idx = std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                     cumulative.begin();
        if (idx >= dist.support.size()) idx = dist.support.size() - 1;
        const Pattern& outcome = dist.support[idx];
        const int64_t frame_start = static_cast<int64_t>(f) * g.period_ps;
        for (size_t bin = 0; bin < outcome.size(); ++bin) {
            for (int p = 0; p < outcome[bin]; ++p) {
                if (rs.next_double() >= detector_efficiency) continue;
                int64_t t = frame_start + static_cast<int64_t>(bin) * g.tau_ps;
                if (jitter_sigma_ps > 0.0) {
                    t += std::llround(jitter_sigma_ps * rs.next_gaussian());
                }
                stream.tags.push_back(TimeTag{t, 0});
            }
        }
    }
    std::stable_sort(stream.tags.begin(), stream.tags.end(),
                     [](const TimeTag& a, const TimeTag& b) {
                         return a.timestamp_ps < b.timestamp_ps;
                     });
    return stream;
}

std::vector<SequenceRecord> bin_tags(const TagStream& stream, const ExperimentSpec& spec,
                                     double window_ns, int64_t t0_ps) {
    spec.validate();
    if (!(window_ns > 0.0 && window_ns < spec.schedule.bin_period_ns)) {
        throw std::invalid_argument("bin_tags: window must lie in (0, bin_period)");
    }
    if (!stream.is_sorted()) {
        throw std::invalid_argument("bin_tags: stream must be sorted by timestamp");
    }

    const FrameGeometry g = geometry(spec);
    const int64_t half_window_ps = std::llround(window_ns * 1000.0 / 2.0);

    std::vector<SequenceRecord> records;
    SequenceRecord* current = nullptr;
    for (const TimeTag& tag : stream.tags) {
        const int64_t rel = tag.timestamp_ps - t0_ps;
        const int64_t frame = floor_div(rel, g.period_ps);
        const int64_t in_frame = rel - frame * g.period_ps;  // in [0, period)

        if (current == nullptr || current->frame_index != frame) {
            records.push_back(SequenceRecord{frame, {}, 0, 0});
            current = &records.back();
        }

        // nearest bin center at (bin-1) * tau
        const int64_t nearest = floor_div(in_frame + g.tau_ps / 2, g.tau_ps);
        const int64_t distance = std::llabs(in_frame - nearest * g.tau_ps);
        if (nearest < 0 || nearest >= g.modes || distance > half_window_ps) {
            current->stray_count += 1;
            continue;
        }
        const int bin = static_cast<int>(nearest) + 1;
        if (!current->occupied_bins.insert(bin).second) {
            current->duplicate_count += 1;  // one detector cannot resolve these
        }
    }
    return records;
}

uint64_t EventCounts::total() const {
    uint64_t t = 0;
    for (const auto& [pattern, count] : counts) t += count;
    return t;
}

EventCounts extract_events(const std::vector<SequenceRecord>& records, int photons,
                           int modes) {
    if (photons < 1) throw std::invalid_argument("extract_events: photons must be >= 1");
    if (modes < photons) throw std::invalid_argument("extract_events: modes must be >= photons");
    EventCounts events;
    events.frames_seen = records.size();
    for (const SequenceRecord& record : records) {
        const int cardinality = static_cast<int>(record.occupied_bins.size());
        events.cardinality_census[cardinality] += 1;
        if (cardinality != photons) continue;
        Pattern pattern(modes, 0);
        for (int bin : record.occupied_bins) pattern[bin - 1] = 1;
        events.counts[pattern] += 1;
    }
    return events;
}

void write_tag_stream(const std::string& path, const TagStream& stream) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    char header[16] = {};
    std::memcpy(header, kMagic, sizeof(kMagic));
    header[8] = static_cast<char>(kVersion & 0xff);
    header[9] = static_cast<char>((kVersion >> 8) & 0xff);
    header[10] = static_cast<char>((kVersion >> 16) & 0xff);
    header[11] = static_cast<char>((kVersion >> 24) & 0xff);
    file.write(header, sizeof(header));
    for (const TimeTag& tag : stream.tags) {
        const auto ts = static_cast<uint64_t>(tag.timestamp_ps);
        char record[9];
        for (int b = 0; b < 8; ++b) record[b] = static_cast<char>((ts >> (8 * b)) & 0xff);
        record[8] = static_cast<char>(tag.channel);
        file.write(record, sizeof(record));
    }
    if (!file) throw std::runtime_error("write failed: " + path);
}

TagStream read_tag_stream(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open for reading: " + path);
    char header[16];
    if (!file.read(header, sizeof(header)) || std::memcmp(header, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("bad tag file header: " + path);
    }
    const uint32_t version = static_cast<uint8_t>(header[8]) |
                             (static_cast<uint8_t>(header[9]) << 8) |
                             (static_cast<uint8_t>(header[10]) << 16) |
                             (static_cast<uint8_t>(header[11]) << 24);
    if (version != kVersion) throw std::runtime_error("unsupported tag file version");
    TagStream stream;
    stream.origin = StreamOrigin::file;
    char record[9];
    while (file.read(record, sizeof(record))) {
        uint64_t ts = 0;
        for (int b = 0; b < 8; ++b) {
            ts |= static_cast<uint64_t>(static_cast<uint8_t>(record[b])) << (8 * b);
        }
        stream.tags.push_back(TimeTag{static_cast<int64_t>(ts),
                                      static_cast<uint8_t>(record[8])});
    }
    if (file.gcount() != 0) throw std::runtime_error("truncated tag record in: " + path);
    return stream;
}

void write_tag_stream_csv(const std::string& path, const TagStream& stream) {
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    file << "timestamp_ps,channel\n";
    for (const TimeTag& tag : stream.tags) {
        file << tag.timestamp_ps << ',' << static_cast<int>(tag.channel) << '\n';
    }
    if (!file) throw std::runtime_error("write failed: " + path);
}

TagStream read_tag_stream_csv(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw std::runtime_error("cannot open for reading: " + path);
    TagStream stream;
    stream.origin = StreamOrigin::file;
    std::string line;
    bool first = true;
    while (std::getline(file, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("timestamp_ps", 0) == 0) continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("bad tag csv line: " + line);
        stream.tags.push_back(TimeTag{std::stoll(line.substr(0, comma)),
                                      static_cast<uint8_t>(std::stoi(line.substr(comma + 1)))});
    }
    return stream;
}

}  // namespace loopsim
