#ifndef SPDT_IO_HPP
#define SPDT_IO_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "spdt/network.hpp"

namespace spdt {

// Flat key=value parameter files. Values are kept as strings until typed
// access; insertion order is preserved on write so files are reproducible.
class KvFile {
  public:
    static KvFile load(const std::string &path);
    void save(const std::string &path) const;

    bool has(const std::string &key) const;
    double get_double(const std::string &key) const;
    double get_double(const std::string &key, double fallback) const;
    std::int64_t get_int(const std::string &key) const;
    std::int64_t get_int(const std::string &key, std::int64_t fallback) const;

    void set_double(const std::string &key, double value);
    void set_int(const std::string &key, std::int64_t value);

    const std::vector<std::pair<std::string, std::string>> &entries() const { return entries_; }
    const std::string &source_path() const { return path_; }

  private:
    const std::string *find(const std::string &key) const;
    std::vector<std::pair<std::string, std::string>> entries_;
    std::string path_;
};

std::string format_double(double v); // shortest round-trip decimal form

// Link-event interchange format. One record per line:
//   host_id,copy_start_step,copy_end_step,neighbour_id,join_step,leave_step
// The companion metadata file carries step_seconds, horizon_steps,
// delta_steps, node_count. Both are bit-exact contracts.

void write_network(const ContactNetwork &net, const std::string &dir);
ContactNetwork read_network(const std::string &dir);

std::string links_path(const std::string &dir);
std::string meta_path(const std::string &dir);

void append_link_record(std::string &buf, const ContactLink &l);
void write_meta(const TimeGrid &grid, std::uint32_t n_nodes, std::uint32_t delta_steps,
                const std::string &dir);

// Streaming writer: emits canonically ordered link records from unordered
// batches without holding the whole network in memory. Batches are sorted and
// spilled to a temporary binary file, then k-way merged into the text output.
class StreamingLinkWriter {
  public:
    StreamingLinkWriter(const std::string &dir, TimeGrid grid, std::uint32_t n_nodes,
                        std::uint32_t delta_steps, std::size_t max_buffered_links = 1u << 24);
    ~StreamingLinkWriter();

    void add(const ContactLink &l);
    void finish(); // merge spills, write links + metadata

    std::uint64_t links_written() const { return total_; }

  private:
    void spill();

    std::string dir_;
    TimeGrid grid_;
    std::uint32_t n_nodes_;
    std::uint32_t delta_steps_;
    std::size_t max_buffered_;
    std::vector<ContactLink> buffer_;
    std::vector<std::uint64_t> run_sizes_;
    std::string spill_path_;
    std::uint64_t total_ = 0;
    bool finished_ = false;
};

// Streaming validation of a link file; returns an empty string when valid,
// otherwise "<line>: <problem>" for the first violation.
std::string validate_network_file(const std::string &dir);

// Plain-text helpers shared by the CLI.
std::vector<std::int64_t> read_integer_column(const std::string &path);
void write_text_file(const std::string &path, const std::string &content);
std::string read_text_file(const std::string &path);

} // namespace spdt

#endif
