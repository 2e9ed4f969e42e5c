#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "loopsim/fock.hpp"
#include "loopsim/protocol.hpp"

namespace loopsim {

struct TimeTag {
    int64_t timestamp_ps = 0;
    uint8_t channel = 0;

    friend bool operator==(const TimeTag&, const TimeTag&) = default;
};

enum class StreamOrigin { synthetic, file };

// Detector clicks sorted by timestamp. Single-detector experiments use
// channel 0 only.
struct TagStream {
    std::vector<TimeTag> tags;
    StreamOrigin origin = StreamOrigin::synthetic;

    bool is_sorted() const;
};

// Per-frame reduction of a stream: which bins clicked, plus bookkeeping for
// tags that landed outside every bin window and for repeated clicks inside
// one bin (counted once).
struct SequenceRecord {
    int64_t frame_index = 0;
    std::set<int> occupied_bins;  // 1-indexed
    int stray_count = 0;
    int duplicate_count = 0;
};

// Outcome sequence that synthesize_stream realizes for the same seed:
// frame f draws from (seed, "frame", f) before any thinning or jitter.
std::vector<Pattern> draw_outcomes(const PhotonDistribution& dist, int frames,
                                   uint64_t seed);

// Per frame: draw an outcome, thin each photon by detector_efficiency, and
// emit one channel-0 tag per surviving photon at
// frame * T + (bin-1) * tau + gaussian jitter (integer picoseconds).
TagStream synthesize_stream(const PhotonDistribution& dist, const ExperimentSpec& spec,
                            double detector_efficiency, double jitter_sigma_ps,
                            int frames, uint64_t seed);

// Assign tags to (frame, bin) by Euclidean division of (timestamp - t0) by
// T and tau. Tags farther than window/2 from their nearest bin center are
// strays; repeated tags in one bin count once. Frames with no tags produce
// no record. Requires window_ns < bin_period_ns and a sorted stream.
std::vector<SequenceRecord> bin_tags(const TagStream& stream, const ExperimentSpec& spec,
                                     double window_ns, int64_t t0_ps = 0);

struct EventCounts {
    std::map<Pattern, uint64_t> counts;          // frames with exactly n occupied bins
    std::map<int, uint64_t> cardinality_census;  // all frames, by occupied-bin count
    uint64_t frames_seen = 0;

    uint64_t total() const;
};

// Collision-free n-photon event counts; frames of any other cardinality go
// to the census only.
EventCounts extract_events(const std::vector<SequenceRecord>& records, int photons,
                           int modes);

// Binary tag file: 16-byte header (8-byte magic "LOOPTAGS", uint32 version,
// 4 reserved bytes) followed by little-endian records of
// (uint64 timestamp_ps, uint8 channel).
void write_tag_stream(const std::string& path, const TagStream& stream);
TagStream read_tag_stream(const std::string& path);

// CSV alternative: header line "timestamp_ps,channel".
void write_tag_stream_csv(const std::string& path, const TagStream& stream);
TagStream read_tag_stream_csv(const std::string& path);

}  // namespace loopsim
