#include "schelling/output.hpp"

#include <stdexcept>

namespace schelling {

void write_ppm(std::ostream& out, const Configuration& config, int z, const std::string& comment) {
    const int n = config.n();
    if (z < 0 || z >= (config.dim() == 3 ? n : 1))
        throw ParameterError("slice index out of range");
    const NeighborCounts counts = build_counts(config);
    const std::int64_t total = neighborhood_size(config.params());
    out << "P6\n";
    if (!comment.empty())
        out << "# " << comment << '\n';
    out << n << ' ' << n << "\n255\n";
    std::vector<char> row(static_cast<std::size_t>(3) * n);
    // Row 0 of the image is the largest y.
    for (int y = n - 1; y >= 0; --y) {
        for (int x = 0; x < n; ++x) {
            const NodeId id = config.index({x, y, z});
            const std::int64_t same = same_type_count(config, counts, id);
            const auto shade = static_cast<unsigned char>(128 + (127 * same) / total);
            const bool alpha = config[id] == NodeType::Alpha;
            row[3 * x] = static_cast<char>(alpha ? shade : 0);
            row[3 * x + 1] = static_cast<char>(alpha ? 0 : shade);
            row[3 * x + 2] = 0;
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

namespace {
constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kAlphabet[v >> 18];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += kAlphabet[v & 63];
    }
    const std::size_t rest = bytes.size() - i;
    if (rest > 0) {
        std::uint32_t v = bytes[i] << 16;
        if (rest == 2)
            v |= bytes[i + 1] << 8;
        out += kAlphabet[v >> 18];
        out += kAlphabet[(v >> 12) & 63];
        out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0)
        throw std::invalid_argument("base64 length must be a multiple of 4");
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        throw std::invalid_argument("invalid base64 character");
    };
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < text.size(); i += 4) {
        const int pad = (text[i + 3] == '=') + (text[i + 2] == '=');
        if (pad > 0 && i + 4 != text.size())
            throw std::invalid_argument("base64 padding before the end");
        std::uint32_t v = (value(text[i]) << 18) | (value(text[i + 1]) << 12);
        if (pad < 2)
            v |= value(text[i + 2]) << 6;
        if (pad < 1)
            v |= value(text[i + 3]);
        out.push_back(static_cast<std::uint8_t>(v >> 16));
        if (pad < 2)
            out.push_back(static_cast<std::uint8_t>((v >> 8) & 255));
        if (pad < 1)
            out.push_back(static_cast<std::uint8_t>(v & 255));
    }
    return out;
}

std::vector<std::uint8_t> pack_config(const Configuration& config) {
    std::vector<std::uint8_t> bytes((config.size() + 7) / 8);
    for (NodeId i = 0; i < config.size(); ++i)
        if (config[i] == NodeType::Alpha)
            bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    return bytes;
}

Configuration unpack_config(const ModelParams& params, const std::vector<std::uint8_t>& bytes) {
    Configuration c(params, NodeType::Beta);
    if (bytes.size() != (c.size() + 7) / 8)
        throw ParameterError("packed configuration has the wrong length");
    for (NodeId i = 0; i < c.size(); ++i)
        if ((bytes[i / 8] >> (i % 8)) & 1)
            c.set(i, NodeType::Alpha);
    return c;
}

nlohmann::json params_json(const ModelParams& p) {
    return {{"dim", p.dim},
            {"n", p.n},
            {"w", p.w},
            {"tau_alpha", p.tau_alpha.to_string()},
            {"tau_beta", p.tau_beta.to_string()}};
}

nlohmann::json run_record_json(const Configuration& initial, const RunResult& result, const RunOptions& options,
                               const RunRecordOptions& record) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["params"] = params_json(initial.params());
    j["seed"] = result.seed;
    j["order"] = options.order == NodeOrder::Lexicographic ? "lexicographic" : "seeded_random";
    j["order_seed"] = options.order_seed;
    j["max_stages"] = options.max_stages == 0 ? default_max_stages(initial.params()) : options.max_stages;
    j["rng"] = kRngName;
    j["terminated"] = result.terminated;
    j["stages"] = result.reports.size();
    nlohmann::json reports = nlohmann::json::array();
    for (const StageReport& r : result.reports)
        reports.push_back(
            {{"stage", r.stage}, {"flips", r.flips}, {"alpha_count", r.alpha_count}, {"lyapunov", r.lyapunov}});
    j["reports"] = std::move(reports);
    j["initial_alpha_fraction"] = alpha_fraction(initial);
    j["final_alpha_fraction"] = alpha_fraction(result.final);
    j["unchanged_fraction"] = unchanged_fraction(initial, result.final);
    j["epsilon"] = record.epsilon;
    j["label"] = std::string(to_string(classify_run(initial, result.final, record.epsilon)));
    if (record.embed_final) {
        j["final_config_encoding"] = "bits, node id order, lsb first, 1 = alpha";
        j["final_config_base64"] = base64_encode(pack_config(result.final));
    }
    return j;
}

nlohmann::json trial_stats_json(const ModelParams& params, const TrialStats& s) {
    auto iv = [](const Interval& i) { return nlohmann::json::array({i.lo, i.hi}); };
    nlohmann::json labels;
    for (std::size_t i = 0; i < kLabelCount; ++i)
        labels[std::string(to_string(static_cast<BehaviorLabel>(i)))] = s.label_counts[i];
    return {{"version", kVersion},
            {"params", params_json(params)},
            {"runs", s.runs},
            {"mean_unchanged_fraction", s.mean_unchanged_fraction},
            {"mean_alpha_fraction_final", s.mean_alpha_fraction_final},
            {"all_beta_count", s.all_beta_count},
            {"all_alpha_count", s.all_alpha_count},
            {"nonterminated_count", s.nonterminated_count},
            {"ci95",
             {{"unchanged_fraction", iv(s.unchanged_ci)},
              {"alpha_fraction", iv(s.alpha_fraction_ci)},
              {"all_beta", iv(s.all_beta_ci)},
              {"all_alpha", iv(s.all_alpha_ci)}}},
            {"label_counts", labels},
            {"majority", std::string(to_string(s.majority()))}};
}

namespace {

std::string rational_token(const Rational& r) {
    std::int64_t den = r.den();
    int twos = 0, fives = 0;
    while (den % 2 == 0) den /= 2, ++twos;
    while (den % 5 == 0) den /= 5, ++fives;
    const int digits = std::max(twos, fives);
    if (den != 1 || digits > 12 || r.num() < 0)
        return std::to_string(r.num()) + "-" + std::to_string(r.den());
    std::int64_t scale = 1;
    for (int i = 0; i < digits; ++i)
        scale *= 10;
    const std::int64_t scaled = r.num() * (scale / r.den());
    std::string s = std::to_string(scaled / scale);
    if (digits > 0) {
        std::string frac = std::to_string(scaled % scale);
        s += "." + std::string(static_cast<std::size_t>(digits) - frac.size(), '0') + frac;
    }
    return s;
}

}  // namespace

std::string params_stem(const ModelParams& p) {
    return "d" + std::to_string(p.dim) + "_n" + std::to_string(p.n) + "_w" + std::to_string(p.w) + "_ta" +
           rational_token(p.tau_alpha) + "_tb" + rational_token(p.tau_beta);
}

OutputFile::OutputFile(std::filesystem::path path)
    : path_(std::move(path)), partial_(path_.string() + ".partial"),
      out_(partial_, std::ios::binary | std::ios::trunc) {
    if (!out_)
        throw std::runtime_error("cannot open " + partial_.string() + " for writing");
}

OutputFile::~OutputFile() {
    if (!committed_ && out_.is_open())
        out_.close();
}

void OutputFile::commit() {
    out_.flush();
    if (!out_)
        throw std::runtime_error("write failed for " + partial_.string());
    out_.close();
    std::error_code ec;
    std::filesystem::rename(partial_, path_, ec);
    if (ec)
        throw std::runtime_error("cannot rename " + partial_.string() + ": " + ec.message());
    committed_ = true;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read config file " + path.string());
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(number) + ": expected key = value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

}  // namespace schelling
