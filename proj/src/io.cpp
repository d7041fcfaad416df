#include "spdt/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <queue>

#include "spdt/errors.hpp"

namespace spdt {

namespace fs = std::filesystem;

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- KvFile --

KvFile KvFile::load(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw data_error("cannot open parameter file: " + path);
    KvFile kv;
    kv.path_ = path;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#')
            continue;
        std::size_t eq = line.find('=', start);
        if (eq == std::string::npos)
            throw data_error(path + ":" + std::to_string(lineno) + ": expected key=value, got '" +
                             line + "'");
        std::string key = line.substr(start, eq - start);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
            key.pop_back();
        std::string value = line.substr(eq + 1);
        std::size_t vs = value.find_first_not_of(" \t");
        value = vs == std::string::npos ? std::string() : value.substr(vs);
        while (!value.empty() && (value.back() == ' ' || value.back() == '\t'))
            value.pop_back();
        if (key.empty())
            throw data_error(path + ":" + std::to_string(lineno) + ": empty key");
        kv.entries_.emplace_back(std::move(key), std::move(value));
    }
    return kv;
}

void KvFile::save(const std::string &path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw data_error("cannot write parameter file: " + path);
    for (const auto &[k, v] : entries_)
        out << k << '=' << v << '\n';
}

const std::string *KvFile::find(const std::string &key) const
{
    for (const auto &[k, v] : entries_)
        if (k == key)
            return &v;
    return nullptr;
}

bool KvFile::has(const std::string &key) const { return find(key) != nullptr; }

double KvFile::get_double(const std::string &key) const
{
    const std::string *v = find(key);
    if (!v)
        throw data_error("missing parameter '" + key + "' in " +
                         (path_.empty() ? "parameter set" : path_));
    char *end = nullptr;
    double d = std::strtod(v->c_str(), &end);
    if (end != v->c_str() + v->size() || v->empty())
        throw data_error("parameter '" + key + "' is not a number: '" + *v + "'");
    return d;
}

double KvFile::get_double(const std::string &key, double fallback) const
{
    return has(key) ? get_double(key) : fallback;
}

std::int64_t KvFile::get_int(const std::string &key) const
{
    const std::string *v = find(key);
    if (!v)
        throw data_error("missing parameter '" + key + "' in " +
                         (path_.empty() ? "parameter set" : path_));
    std::int64_t value = 0;
    auto res = std::from_chars(v->data(), v->data() + v->size(), value);
    if (res.ec != std::errc() || res.ptr != v->data() + v->size())
        throw data_error("parameter '" + key + "' is not an integer: '" + *v + "'");
    return value;
}

std::int64_t KvFile::get_int(const std::string &key, std::int64_t fallback) const
{
    return has(key) ? get_int(key) : fallback;
}

void KvFile::set_double(const std::string &key, double value)
{
    for (auto &[k, v] : entries_)
        if (k == key) {
            v = format_double(value);
            return;
        }
    entries_.emplace_back(key, format_double(value));
}

void KvFile::set_int(const std::string &key, std::int64_t value)
{
    for (auto &[k, v] : entries_)
        if (k == key) {
            v = std::to_string(value);
            return;
        }
    entries_.emplace_back(key, std::to_string(value));
}

// ---------------------------------------------------------- link files --

std::string links_path(const std::string &dir) { return dir + "/links.csv"; }
std::string meta_path(const std::string &dir) { return dir + "/meta.kv"; }

void append_link_record(std::string &buf, const ContactLink &l)
{
    char tmp[96];
    char *p = tmp;
    auto put = [&p](std::uint64_t v, char sep) {
        auto res = std::to_chars(p, p + 20, v);
        p = res.ptr;
        *p++ = sep;
    };
    put(l.host, ',');
    put(l.copy_start, ',');
    put(l.copy_end, ',');
    put(l.neighbour, ',');
    put(l.join_step, ',');
    put(l.leave_step, '\n');
    buf.append(tmp, p - tmp);
}

void write_meta(const TimeGrid &grid, std::uint32_t n_nodes, std::uint32_t delta_steps,
                const std::string &dir)
{
    KvFile meta;
    meta.set_int("step_seconds", grid.step_seconds);
    meta.set_int("horizon_steps", grid.horizon_steps);
    meta.set_int("delta_steps", delta_steps);
    meta.set_int("node_count", n_nodes);
    meta.save(meta_path(dir));
}

void write_network(const ContactNetwork &net, const std::string &dir)
{
    fs::create_directories(dir);
    std::ofstream out(links_path(dir), std::ios::binary);
    if (!out)
        throw data_error("cannot write " + links_path(dir));
    std::string buf;
    buf.reserve(1 << 22);
    for (const ContactLink &l : net.links) {
        append_link_record(buf, l);
        if (buf.size() > (1 << 22) - 96) {
            out.write(buf.data(), (std::streamsize)buf.size());
            buf.clear();
        }
    }
    out.write(buf.data(), (std::streamsize)buf.size());
    if (!out)
        throw data_error("write failed on " + links_path(dir));
    out.close();
    write_meta(net.grid, net.n_nodes, net.delta_steps, dir);
}

namespace {

struct LineParser {
    const char *p;
    const char *end;
    std::size_t lineno = 0;

    bool next_record(ContactLink &l, std::string &problem)
    {
        while (p != end && (*p == '\n' || *p == '\r'))
            ++p;
        if (p == end)
            return false;
        ++lineno;
        std::uint64_t f[6];
        for (int i = 0; i < 6; ++i) {
            auto res = std::from_chars(p, end, f[i]);
            if (res.ec != std::errc()) {
                problem = "field " + std::to_string(i + 1) + " is not an unsigned integer";
                return false;
            }
            p = res.ptr;
            if (i < 5) {
                if (p == end || *p != ',') {
                    problem = "expected ',' after field " + std::to_string(i + 1);
                    return false;
                }
                ++p;
            }
        }
        if (p != end && *p != '\n' && *p != '\r') {
            problem = "trailing characters after record";
            return false;
        }
        const std::uint64_t limit = 0xffffffffULL;
        for (int i = 0; i < 6; ++i)
            if (f[i] > limit) {
                problem = "field " + std::to_string(i + 1) + " out of range";
                return false;
            }
        l = ContactLink{(NodeId)f[0], (std::uint32_t)f[1], (std::uint32_t)f[2],
                        (NodeId)f[3],  (std::uint32_t)f[4], (std::uint32_t)f[5]};
        return true;
    }
};

struct MetaInfo {
    TimeGrid grid;
    std::uint32_t n_nodes;
    std::uint32_t delta_steps;
};

MetaInfo load_meta(const std::string &dir)
{
    KvFile meta = KvFile::load(meta_path(dir));
    MetaInfo m;
    m.grid = TimeGrid((std::uint32_t)meta.get_int("step_seconds"),
                      (std::uint32_t)meta.get_int("horizon_steps"));
    m.delta_steps = (std::uint32_t)meta.get_int("delta_steps");
    m.n_nodes = (std::uint32_t)meta.get_int("node_count");
    return m;
}

} // namespace

ContactNetwork read_network(const std::string &dir)
{
    const MetaInfo meta = load_meta(dir);
    const std::string text = read_text_file(links_path(dir));

    std::vector<ContactLink> links;
    std::vector<ActiveCopy> copies;
    LineParser parser{text.data(), text.data() + text.size()};
    ContactLink l;
    std::string problem;
    bool have_prev = false;
    ContactLink prev{};
    while (parser.next_record(l, problem)) {
        if (!have_prev || l.host != prev.host || l.copy_start != prev.copy_start)
            copies.push_back(ActiveCopy{l.host, l.copy_start, l.copy_end, 0, 0});
        links.push_back(l);
        prev = l;
        have_prev = true;
    }
    if (!problem.empty())
        throw data_error(links_path(dir) + ":" + std::to_string(parser.lineno) + ": " + problem);
    // Input need not be canonical: copies collected above may duplicate if the
    // same copy's links were not adjacent; dedupe after sorting.
    std::sort(copies.begin(), copies.end(), [](const ActiveCopy &a, const ActiveCopy &b) {
        return a.host != b.host ? a.host < b.host : a.start_step < b.start_step;
    });
    copies.erase(std::unique(copies.begin(), copies.end(),
                             [](const ActiveCopy &a, const ActiveCopy &b) {
                                 return a.host == b.host && a.start_step == b.start_step &&
                                        a.end_step == b.end_step;
                             }),
                 copies.end());
    return assemble_network(meta.grid, meta.n_nodes, meta.delta_steps, std::move(copies),
                            std::move(links));
}

// ------------------------------------------------- StreamingLinkWriter --

StreamingLinkWriter::StreamingLinkWriter(const std::string &dir, TimeGrid grid,
                                         std::uint32_t n_nodes, std::uint32_t delta_steps,
                                         std::size_t max_buffered_links)
    : dir_(dir), grid_(grid), n_nodes_(n_nodes), delta_steps_(delta_steps),
      max_buffered_(max_buffered_links)
{
    fs::create_directories(dir_);
    spill_path_ = dir_ + "/.links.spill";
    buffer_.reserve(std::min<std::size_t>(max_buffered_, 1 << 20));
}

StreamingLinkWriter::~StreamingLinkWriter()
{
    std::error_code ec;
    fs::remove(spill_path_, ec);
}

void StreamingLinkWriter::add(const ContactLink &l)
{
    buffer_.push_back(l);
    ++total_;
    if (buffer_.size() >= max_buffered_)
        spill();
}

void StreamingLinkWriter::spill()
{
    if (buffer_.empty())
        return;
    std::sort(buffer_.begin(), buffer_.end(), link_less);
    std::ofstream out(spill_path_, std::ios::binary | std::ios::app);
    if (!out)
        throw data_error("cannot write spill file " + spill_path_);
    out.write(reinterpret_cast<const char *>(buffer_.data()),
              (std::streamsize)(buffer_.size() * sizeof(ContactLink)));
    if (!out)
        throw data_error("write failed on spill file " + spill_path_);
    run_sizes_.push_back(buffer_.size());
    buffer_.clear();
}

namespace {

class RunCursor {
  public:
    RunCursor(std::FILE *f, std::uint64_t begin, std::uint64_t count)
        : file_(f), next_offset_(begin), remaining_(count)
    {
        refill();
    }

    bool empty() const { return pos_ == chunk_.size() && remaining_ == 0; }
    const ContactLink &front() const { return chunk_[pos_]; }
    void pop()
    {
        if (++pos_ == chunk_.size() && remaining_ > 0)
            refill();
    }

  private:
    void refill()
    {
        const std::size_t n = (std::size_t)std::min<std::uint64_t>(remaining_, 1 << 18);
        chunk_.resize(n);
        pos_ = 0;
        if (n == 0)
            return;
        if (std::fseek(file_, (long)(next_offset_ * sizeof(ContactLink)), SEEK_SET) != 0 ||
            std::fread(chunk_.data(), sizeof(ContactLink), n, file_) != n)
            throw data_error("spill file read failed");
        next_offset_ += n;
        remaining_ -= n;
    }

    std::FILE *file_;
    std::uint64_t next_offset_;
    std::uint64_t remaining_;
    std::vector<ContactLink> chunk_;
    std::size_t pos_ = 0;
};

} // namespace

void StreamingLinkWriter::finish()
{
    if (finished_)
        return;
    finished_ = true;

    std::ofstream out(links_path(dir_), std::ios::binary);
    if (!out)
        throw data_error("cannot write " + links_path(dir_));
    std::string textbuf;
    textbuf.reserve(1 << 22);
    auto emit = [&](const ContactLink &l) {
        append_link_record(textbuf, l);
        if (textbuf.size() > (1 << 22) - 96) {
            out.write(textbuf.data(), (std::streamsize)textbuf.size());
            textbuf.clear();
        }
    };

    if (run_sizes_.empty()) {
        // Everything fit in memory.
        std::sort(buffer_.begin(), buffer_.end(), link_less);
        for (const ContactLink &l : buffer_)
            emit(l);
    } else {
        spill(); // flush the tail as a final run
        std::FILE *f = std::fopen(spill_path_.c_str(), "rb");
        if (!f)
            throw data_error("cannot reopen spill file " + spill_path_);
        std::vector<RunCursor> runs;
        std::uint64_t off = 0;
        for (std::uint64_t sz : run_sizes_) {
            runs.emplace_back(f, off, sz);
            off += sz;
        }
        auto heap_less = [&runs](std::size_t a, std::size_t b) {
            return link_less(runs[b].front(), runs[a].front()); // min-heap
        };
        std::vector<std::size_t> heap;
        for (std::size_t i = 0; i < runs.size(); ++i)
            if (!runs[i].empty())
                heap.push_back(i);
        std::make_heap(heap.begin(), heap.end(), heap_less);
        while (!heap.empty()) {
            std::pop_heap(heap.begin(), heap.end(), heap_less);
            const std::size_t i = heap.back();
            emit(runs[i].front());
            runs[i].pop();
            if (runs[i].empty())
                heap.pop_back();
            else
                std::push_heap(heap.begin(), heap.end(), heap_less);
        }
        std::fclose(f);
        std::error_code ec;
        fs::remove(spill_path_, ec);
    }
    out.write(textbuf.data(), (std::streamsize)textbuf.size());
    if (!out)
        throw data_error("write failed on " + links_path(dir_));
    out.close();
    write_meta(grid_, n_nodes_, delta_steps_, dir_);
}

// ------------------------------------------------- streaming validation --

std::string validate_network_file(const std::string &dir)
{
    MetaInfo meta;
    try {
        meta = load_meta(dir);
    } catch (const std::exception &e) {
        return std::string("metadata: ") + e.what();
    }
    std::ifstream in(links_path(dir), std::ios::binary);
    if (!in)
        return "cannot open " + links_path(dir);

    const std::uint64_t horizon = meta.grid.horizon_steps;
    std::string line;
    std::size_t lineno = 0;
    bool have_prev = false;
    ContactLink prev{};
    // Last copy interval seen per host, to check inter-copy ordering.
    std::vector<std::uint32_t> last_copy_end(meta.n_nodes, 0);
    std::vector<bool> host_seen(meta.n_nodes, false);

    auto fail = [&](const std::string &what) {
        return "line " + std::to_string(lineno) + ": " + what;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        ContactLink l;
        {
            LineParser p{line.data(), line.data() + line.size()};
            std::string problem;
            if (!p.next_record(l, problem))
                return fail(problem.empty() ? "malformed record" : problem);
        }
        if (l.host >= meta.n_nodes)
            return fail("host id " + std::to_string(l.host) + " out of range");
        if (l.neighbour >= meta.n_nodes)
            return fail("neighbour id " + std::to_string(l.neighbour) + " out of range");
        if (l.neighbour == l.host)
            return fail("self-link on node " + std::to_string(l.host));
        if (!(l.copy_start < l.copy_end))
            return fail("copy interval empty (" + std::to_string(l.copy_start) + "," +
                        std::to_string(l.copy_end) + ")");
        if (l.copy_end > horizon)
            return fail("copy end " + std::to_string(l.copy_end) + " beyond horizon " +
                        std::to_string(horizon));
        if (!(l.join_step >= l.copy_start) ||
            !(l.join_step < std::uint64_t(l.copy_end) + meta.delta_steps))
            return fail("join step " + std::to_string(l.join_step) + " outside copy lifetime");
        if (!(l.join_step < l.leave_step))
            return fail("non-positive link duration");
        if (l.join_step >= horizon)
            return fail("join step " + std::to_string(l.join_step) + " at or beyond horizon");
        if (have_prev && !link_less(prev, l) ) {
            if (prev.host == l.host && prev.copy_start == l.copy_start &&
                prev.join_step == l.join_step && prev.neighbour == l.neighbour &&
                prev.leave_step == l.leave_step && prev.copy_end == l.copy_end)
                return fail("duplicate record");
            return fail("records out of canonical order");
        }
        const bool new_copy = !have_prev || l.host != prev.host || l.copy_start != prev.copy_start;
        if (!new_copy && l.copy_end != prev.copy_end)
            return fail("copy end disagrees with earlier record of the same copy");
        if (new_copy && host_seen[l.host] && !(l.copy_start > last_copy_end[l.host]))
            return fail("copy start " + std::to_string(l.copy_start) +
                        " does not follow previous copy of host " + std::to_string(l.host));
        if (new_copy) {
            last_copy_end[l.host] = l.copy_end;
            host_seen[l.host] = true;
        }
        prev = l;
        have_prev = true;
    }
    return {};
}

// ------------------------------------------------------------- helpers --

std::vector<std::int64_t> read_integer_column(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw data_error("cannot open sample file: " + path);
    std::vector<std::int64_t> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::int64_t v = 0;
        auto res = std::from_chars(line.data(), line.data() + line.size(), v);
        if (res.ec != std::errc() || res.ptr != line.data() + line.size())
            throw data_error(path + ":" + std::to_string(lineno) + ": not an integer: '" + line +
                             "'");
        values.push_back(v);
    }
    return values;
}

void write_text_file(const std::string &path, const std::string &content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw data_error("cannot write " + path);
    out.write(content.data(), (std::streamsize)content.size());
    if (!out)
        throw data_error("write failed on " + path);
}

std::string read_text_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw data_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

} // namespace spdt
