#include "cosmicbell/events.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

namespace cosmicbell::events {

namespace {

constexpr std::array<const char*, 8> kChannelNames = {"A_red", "A_blue", "A_plus", "A_minus",
                                                      "B_red", "B_blue", "B_plus", "B_minus"};

std::vector<std::uint8_t> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint64_t to_ps(double us) {
    if (us <= 0) return 0;
    return static_cast<std::uint64_t>(std::llround(us * 1e6));
}

void check_non_overlapping(const IntervalSet& s) {
    for (std::size_t i = 1; i < s.intervals.size(); ++i) {
        if (s.intervals[i].t_start < s.intervals[i - 1].t_end)
            throw InternalError("setting intervals overlap on one side");
    }
}

// Index of the interval covering t, if any.
std::optional<std::size_t> covering(const IntervalSet& s, std::uint64_t t) {
    const auto& v = s.intervals;
    auto it = std::upper_bound(v.begin(), v.end(), t,
                               [](std::uint64_t x, const SettingInterval& iv) { return x < iv.t_start; });
    if (it == v.begin()) return std::nullopt;
    --it;
    if (t >= it->t_start && t < it->t_end) return static_cast<std::size_t>(it - v.begin());
    return std::nullopt;
}

std::uint64_t overlap_ps(const IntervalSet& a, const IntervalSet& b) {
    std::uint64_t total = 0;
    std::size_t i = 0, j = 0;
    while (i < a.intervals.size() && j < b.intervals.size()) {
        const auto& x = a.intervals[i];
        const auto& y = b.intervals[j];
        const std::uint64_t lo = std::max(x.t_start, y.t_start);
        const std::uint64_t hi = std::min(x.t_end, y.t_end);
        if (hi > lo) total += hi - lo;
        if (x.t_end < y.t_end) ++i; else ++j;
    }
    return total;
}

}  // namespace

const char* channel_name(Channel c) { return kChannelNames.at(static_cast<std::size_t>(c)); }

Channel channel_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kChannelNames.size(); ++i) {
        if (name == kChannelNames[i]) return static_cast<Channel>(i);
    }
    throw DataError("unknown channel '" + name + "'");
}

Side channel_side(Channel c) { return static_cast<std::uint8_t>(c) < 4 ? Side::A : Side::B; }

bool is_crng(Channel c) { return (static_cast<std::uint8_t>(c) & 3u) < 2u; }

int crng_setting(Channel c) {
    if (!is_crng(c)) throw InternalError("crng_setting on a polarization channel");
    return (static_cast<std::uint8_t>(c) & 1u) + 1;
}

int pol_outcome(Channel c) {
    if (is_crng(c)) throw InternalError("pol_outcome on a CRNG channel");
    return (static_cast<std::uint8_t>(c) & 1u) ? -1 : 1;
}

std::vector<EventRecord> read_events_csv(const std::string& path) {
    const auto bytes = slurp(path);
    const char* p = reinterpret_cast<const char*>(bytes.data());
    const char* end = p + bytes.size();
    std::vector<EventRecord> out;
    std::size_t lineno = 0;
    while (p < end) {
        const char* eol = std::find(p, end, '\n');
        ++lineno;
        std::string_view line(p, static_cast<std::size_t>(eol - p));
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        p = eol < end ? eol + 1 : end;
        if (line.empty() || line.front() == '#') continue;
        if (lineno == 1 && line.starts_with("channel")) continue;
        const auto comma = line.find(',');
        if (comma == std::string_view::npos)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected channel,timestamp_ps");
        EventRecord r;
        r.channel = channel_from_name(std::string(line.substr(0, comma)));
        const auto num = line.substr(comma + 1);
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), r.t_ps);
        if (ec != std::errc() || ptr != num.data() + num.size())
            throw DataError(path + ":" + std::to_string(lineno) + ": bad timestamp");
        out.push_back(r);
    }
    return out;
}

void write_events_csv(const std::string& path, std::span<const EventRecord> events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "channel,timestamp_ps\n";
    char buf[48];
    for (const auto& e : events) {
        const int n = std::snprintf(buf, sizeof buf, "%s,%llu\n", channel_name(e.channel),
                                    static_cast<unsigned long long>(e.t_ps));
        out.write(buf, n);
    }
}

std::vector<EventRecord> parse_events_binary(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 9 != 0) throw DataError("binary event stream length is not a multiple of 9");
    std::vector<EventRecord> out(bytes.size() / 9);
    const std::uint8_t* p = bytes.data();
    for (auto& r : out) {
        if (p[0] > 7) throw DataError("binary event stream: channel code out of range");
        r.channel = static_cast<Channel>(p[0]);
        std::uint64_t t = 0;
        for (int k = 7; k >= 0; --k) t = (t << 8) | p[1 + k];
        r.t_ps = t;
        p += 9;
    }
    return out;
}

std::vector<EventRecord> read_events_binary(const std::string& path) {
    const auto bytes = slurp(path);
    return parse_events_binary(bytes);
}

void write_events_binary(const std::string& path, std::span<const EventRecord> events) {
    std::vector<std::uint8_t> buf(events.size() * 9);
    std::uint8_t* p = buf.data();
    for (const auto& e : events) {
        p[0] = static_cast<std::uint8_t>(e.channel);
        for (int k = 0; k < 8; ++k) p[1 + k] = static_cast<std::uint8_t>(e.t_ps >> (8 * k));
        p += 9;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

std::vector<EventRecord> read_events(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return read_events_csv(path);
    return read_events_binary(path);
}

SessionStreams split_streams(std::span<const EventRecord> events) {
    SessionStreams s;
    for (const auto& e : events) {
        SideStreams& side = channel_side(e.channel) == Side::A ? s.a : s.b;
        (is_crng(e.channel) ? side.crng : side.pol).push_back(e);
    }
    auto by_time = [](const EventRecord& x, const EventRecord& y) { return x.t_ps < y.t_ps; };
    for (auto* v : {&s.a.crng, &s.a.pol, &s.b.crng, &s.b.pol}) std::stable_sort(v->begin(), v->end(), by_time);
    return s;
}

std::int64_t CoincidenceWindow::max_separation_ps() const {
    if (!(width_ns > 0)) throw DomainError("coincidence window must be positive");
    const double half = convention == WindowConvention::full_width ? width_ns / 2.0 : width_ns;
    return std::llround(half * 1000.0);
}

std::vector<Coincidence> find_coincidences(std::span<const std::int64_t> t_a, std::span<const std::int64_t> t_b,
                                           const CoincidenceWindow& w) {
    const std::int64_t tol = w.max_separation_ps();
    std::vector<Coincidence> out;
    std::size_t i = 0, j = 0;
    while (i < t_a.size() && j < t_b.size()) {
        const std::int64_t d = t_b[j] - t_a[i];
        if (d > tol) {
            ++i;
        } else if (d < -tol) {
            ++j;
        } else {
            out.push_back({i, j});
            ++i;
            ++j;
        }
    }
    return out;
}

std::vector<Coincidence> find_coincidences(std::span<const EventRecord> pol_a, std::span<const EventRecord> pol_b,
                                           const DriftModel& drift, const CoincidenceWindow& w) {
    std::vector<std::int64_t> ta(pol_a.size()), tb(pol_b.size());
    std::transform(pol_a.begin(), pol_a.end(), ta.begin(),
                   [](const EventRecord& e) { return static_cast<std::int64_t>(e.t_ps); });
    if (drift.is_zero()) {
        std::transform(pol_b.begin(), pol_b.end(), tb.begin(),
                       [](const EventRecord& e) { return static_cast<std::int64_t>(e.t_ps); });
    } else {
        std::transform(pol_b.begin(), pol_b.end(), tb.begin(), [&](const EventRecord& e) { return drift.apply(e.t_ps); });
    }
    return find_coincidences(ta, tb, w);
}

std::uint64_t IntervalSet::total_ps() const {
    std::uint64_t s = 0;
    for (const auto& iv : intervals) s += iv.t_end - iv.t_start;
    return s;
}

IntervalSet build_setting_intervals(std::span<const EventRecord> crng_events, Side side,
                                    const geom::ChannelDelays& delays, double tau_valid_us) {
    IntervalSet out;
    if (!(tau_valid_us > 0)) {
        out.warning = std::string("side ") + geom::side_name(side) +
                      ": tau_valid <= 0, out of causal alignment; no valid settings";
        return out;
    }
    const std::uint64_t set_ps = to_ps(delays.tau_set_ns * 1e-3);
    const std::uint64_t valid_ps = to_ps(tau_valid_us);
    for (std::size_t k = 0; k < crng_events.size(); ++k) {
        const auto& e = crng_events[k];
        if (k > 0 && e.t_ps < crng_events[k - 1].t_ps) throw DataError("CRNG events not sorted");
        if (channel_side(e.channel) != side || !is_crng(e.channel))
            throw DataError(std::string("unexpected channel ") + channel_name(e.channel) + " in CRNG stream");
        const std::uint64_t start = e.t_ps + set_ps;
        if (!out.intervals.empty() && out.intervals.back().t_end > start) {
            out.intervals.back().t_end = start;  // newer photon supersedes the pending setting
            if (out.intervals.back().t_end <= out.intervals.back().t_start) out.intervals.pop_back();
        }
        out.intervals.push_back({side, crng_setting(e.channel), start, start + valid_ps});
    }
    return out;
}

GateResult gate_and_label(std::span<const Coincidence> coincidences, std::span<const EventRecord> pol_a,
                          std::span<const EventRecord> pol_b, const IntervalSet& intervals_a,
                          const IntervalSet& intervals_b, std::uint64_t session_ps) {
    check_non_overlapping(intervals_a);
    check_non_overlapping(intervals_b);
    GateResult r;
    for (const auto& c : coincidences) {
        const auto& ea = pol_a[c.ia];
        const auto& eb = pol_b[c.ib];
        const auto ka = covering(intervals_a, ea.t_ps);
        if (!ka) continue;
        const auto kb = covering(intervals_b, eb.t_ps);
        if (!kb) continue;
        r.trials.push_back({ea.t_ps, eb.t_ps, intervals_a.intervals[*ka].setting, intervals_b.intervals[*kb].setting,
                            pol_outcome(ea.channel), pol_outcome(eb.channel)});
    }
    if (session_ps == 0) {
        for (const auto* s : {&intervals_a, &intervals_b})
            if (!s->intervals.empty()) session_ps = std::max(session_ps, s->intervals.back().t_end);
    }
    r.duty.coincidences = coincidences.size();
    r.duty.trials = r.trials.size();
    r.duty.session_s = static_cast<double>(session_ps) * 1e-12;
    if (session_ps > 0) {
        const double t = static_cast<double>(session_ps);
        r.duty.duty_a = static_cast<double>(intervals_a.total_ps()) / t;
        r.duty.duty_b = static_cast<double>(intervals_b.total_ps()) / t;
        r.duty.joint_duty = static_cast<double>(overlap_ps(intervals_a, intervals_b)) / t;
    }
    return r;
}

void write_trials_jsonl(const std::string& path, std::span<const TrialRecord> trials) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    char buf[160];
    for (const auto& t : trials) {
        const int n = std::snprintf(buf, sizeof buf, "{\"t_a\":%llu,\"t_b\":%llu,\"a\":%d,\"b\":%d,\"A\":%d,\"B\":%d}\n",
                                    static_cast<unsigned long long>(t.t_a), static_cast<unsigned long long>(t.t_b),
                                    t.setting_a, t.setting_b, t.outcome_a, t.outcome_b);
        out.write(buf, n);
    }
}

std::vector<TrialRecord> read_trials_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::vector<TrialRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            out.push_back({j.at("t_a").get<std::uint64_t>(), j.at("t_b").get<std::uint64_t>(), j.at("a").get<int>(),
                           j.at("b").get<int>(), j.at("A").get<int>(), j.at("B").get<int>()});
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ": " + e.what());
        }
    }
    return out;
}

PipelineResult run_pipeline(const SessionStreams& s, const PipelineOptions& opt) {
    PipelineResult r;
    if (opt.drift) {
        std::vector<std::uint64_t> ta(s.a.pol.size()), tb(s.b.pol.size());
        std::transform(s.a.pol.begin(), s.a.pol.end(), ta.begin(), [](const EventRecord& e) { return e.t_ps; });
        std::transform(s.b.pol.begin(), s.b.pol.end(), tb.begin(), [](const EventRecord& e) { return e.t_ps; });
        r.drift = estimate_clock_drift(ta, tb, *opt.drift);
    }
    r.coincidences = find_coincidences(s.a.pol, s.b.pol, r.drift, opt.window);
    r.intervals_a = build_setting_intervals(s.a.crng, Side::A, opt.delays_a, opt.tau_valid_a_us);
    r.intervals_b = build_setting_intervals(s.b.crng, Side::B, opt.delays_b, opt.tau_valid_b_us);
    r.gated = gate_and_label(r.coincidences, s.a.pol, s.b.pol, r.intervals_a, r.intervals_b, opt.session_ps);
    return r;
}

}  // namespace cosmicbell::events
