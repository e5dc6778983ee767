#include "nnrenyi/gamma_cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cmath>
#include <json.hpp>
#include <sstream>

#include "nnrenyi/error.hpp"
#include "nnrenyi/version.hpp"

namespace nnrenyi {

using nlohmann::json;

namespace {

class LockedFile {
 public:
  explicit LockedFile(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) throw IoError("cannot open gamma cache " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw IoError("cannot lock gamma cache " + path.string());
    }
  }
  ~LockedFile() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  LockedFile(const LockedFile&) = delete;
  LockedFile& operator=(const LockedFile&) = delete;

  std::string read_all() const {
    std::string out;
    char buf[8192];
    ::lseek(fd_, 0, SEEK_SET);
    ssize_t got;
    while ((got = ::read(fd_, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(got));
    if (got < 0) throw IoError("cannot read gamma cache");
    return out;
  }

  void append(const std::string& text) const {
    ::lseek(fd_, 0, SEEK_END);
    std::size_t done = 0;
    while (done < text.size()) {
      const ssize_t w = ::write(fd_, text.data() + done, text.size() - done);
      if (w <= 0) throw IoError("cannot write gamma cache");
      done += static_cast<std::size_t>(w);
    }
  }

 private:
  int fd_ = -1;
};

[[noreturn]] void bad_record(std::size_t line, const std::string& why) {
  std::ostringstream msg;
  msg << "invalid gamma record";
  if (line) msg << " at line " << line;
  msg << ": " << why;
  throw DataError(msg.str());
}

std::vector<GammaEstimate> parse_records(const std::string& text) {
  std::vector<GammaEstimate> out;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(gamma_record_from_json(line, no));
  }
  return out;
}

}  // namespace

std::string gamma_record_to_json(const GammaEstimate& est) {
  json j;
  j["d"] = est.key.d;
  j["p"] = est.key.p;
  j["S"] = est.key.spec.ranks();
  j["n_cal"] = est.key.n_cal;
  j["reps"] = est.key.reps;
  j["seed"] = est.seed;
  j["mean"] = est.mean;
  j["std_error"] = est.std_error;
  j["tool_version"] = kToolVersion;
  return j.dump();
}

GammaEstimate gamma_record_from_json(const std::string& text, std::size_t line) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad_record(line, std::string("not JSON (") + e.what() + ")");
  }
  if (!j.is_object()) bad_record(line, "not a JSON object");
  GammaEstimate est;
  try {
    est.key.d = j.at("d").get<unsigned>();
    est.key.p = j.at("p").get<double>();
    est.key.spec = NeighborSpec(j.at("S").get<std::vector<unsigned>>());
    est.key.n_cal = j.at("n_cal").get<std::size_t>();
    est.key.reps = j.at("reps").get<unsigned>();
    est.seed = j.at("seed").get<std::uint64_t>();
    est.mean = j.at("mean").get<double>();
    est.std_error = j.at("std_error").get<double>();
    (void)j.at("tool_version").get<std::string>();
  } catch (const json::exception& e) {
    bad_record(line, std::string("missing or mistyped field (") + e.what() + ")");
  } catch (const Error& e) {
    bad_record(line, e.what());
  }
  if (!(est.mean > 0.0) || !std::isfinite(est.mean)) bad_record(line, "mean must be positive");
  if (!(est.std_error >= 0.0) || !std::isfinite(est.std_error))
    bad_record(line, "std_error must be nonnegative");
  try {
    est.key.validate();
  } catch (const Error& e) {
    bad_record(line, e.what());
  }
  return est;
}

std::vector<GammaEstimate> load_gamma_cache(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  LockedFile f(path);
  return parse_records(f.read_all());
}

GammaEstimate gamma_cache_get_or_compute(const GammaKey& key, const std::filesystem::path& path,
                                         std::uint64_t seed, bool* hit) {
  key.validate();
  LockedFile f(path);
  const std::string text = f.read_all();
  for (const GammaEstimate& est : parse_records(text)) {
    if (est.key == key) {
      if (hit) *hit = true;
      return est;
    }
  }
  const GammaEstimate est = estimate_gamma(key, seed);
  std::string record = gamma_record_to_json(est) + "\n";
  if (!text.empty() && text.back() != '\n') record.insert(record.begin(), '\n');
  f.append(record);
  if (hit) *hit = false;
  return est;
}

}  // namespace nnrenyi
