#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dusm/topology.hpp"

namespace dusm {

using Rng = std::mt19937_64;

/// Class-D IPv4 multicast address.
class GroupAddress {
public:
    GroupAddress() = default;
    /// Throws std::invalid_argument unless the top four bits are 1110.
    explicit GroupAddress(std::uint32_t value);

    static GroupAddress parse(std::string_view dotted_quad);
    static bool is_class_d(std::uint32_t value) { return (value >> 28) == 0xE; }

    std::uint32_t value() const { return value_; }
    std::string str() const;

    auto operator<=>(const GroupAddress&) const = default;

private:
    std::uint32_t value_ = 0xE0000000U;
};

/// Host ordinal in pod-major order; written "h<ordinal>" in traces.
using HostId = int;

enum class EventKind : std::uint8_t { Join, Leave, Send };

struct Event {
    double time = 0.0;
    EventKind kind{};
    GroupAddress group;
    HostId host = 0;
    std::uint64_t bytes = 0;  // Send only

    bool operator==(const Event&) const = default;
};

enum class Placement : std::uint8_t { Random, Nearby };

const char* to_string(Placement p);
const char* to_string(EventKind k);

struct GroupSizeDist {
    int min = 2;
    int max = 32;
    /// 0 is uniform on [min, max]; otherwise P(size = x) is proportional to x^-skew.
    double skew = 1.0;
};

struct TrafficDist {
    /// Zipf exponent over group rank. Unset: tuned so ~70% of groups carry
    /// under 1% of the largest group's bytes.
    std::optional<double> zipf_s;
    std::uint64_t total_bytes = 100ULL << 20;
    std::uint64_t packet_size = 1500;
};

struct WorkloadSpec {
    int num_groups = 1024;
    GroupSizeDist group_size;
    TrafficDist traffic;
    Placement placement = Placement::Random;
    /// Expected membership events per group over the run, excluding founders.
    double churn_rate = 0.0;
    double duration = 100.0;
    std::uint64_t seed = 0;
    /// First address handed out; groups are numbered upward from it.
    std::uint32_t base_address = 0xE1000000U;  // 225.0.0.0
};

class TraceError : public std::runtime_error {
public:
    TraceError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

std::vector<Event> parse_trace(std::istream& in);
std::vector<Event> parse_trace(const std::filesystem::path& path);
void write_trace(std::ostream& out, const std::vector<Event>& events);

/// Exponent s with ~small_fraction of num_groups below small_ratio of the
/// rank-1 group's traffic under a rank^-s law.
double tuned_zipf_exponent(int num_groups, double small_fraction = 0.7, double small_ratio = 0.01);

/// Per-rank byte totals (index 0 is rank 1), before chunking into packets.
std::vector<std::uint64_t> zipf_group_bytes(int num_groups, double s, std::uint64_t total_bytes);

std::vector<HostId> place_members(int group_size, Placement strategy, int num_hosts, Rng& rng);
/// Contiguous run of hosts in pod-major order starting at offset, wrapping.
std::vector<HostId> place_nearby(int group_size, int offset, int num_hosts);

std::vector<Event> generate_synthetic(const WorkloadSpec& spec, const FatTree& topo);

}  // namespace dusm

template <>
struct std::hash<dusm::GroupAddress> {
    std::size_t operator()(const dusm::GroupAddress& a) const noexcept {
        return std::hash<std::uint32_t>{}(a.value());
    }
};
