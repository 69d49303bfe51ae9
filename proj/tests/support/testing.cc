#include "support/testing.h"

#include <fcntl.h>
#include <netinet/in.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <csignal>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "idsign/disclosure/demo_issuer.h"
#include "idsign/error.h"
#include "idsign/pdf/container.h"
#include "idsign/session/client.h"

extern char** environ;

namespace idsign::testing {

namespace fs = std::filesystem;

fs::path FixturePath(const std::string& name) {
  return fs::path(IDSIGN_FIXTURE_DIR) / name;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::vector<fs::path> CorpusFiles() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(FixturePath("corpus"))) {
    if (e.path().extension() == ".pdf") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

AttributeId Demo(const std::string& name) {
  return AttributeId("demo", "demo-issuer", "id-card", name);
}

std::string Hex(std::string_view bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : bytes) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 15]);
  }
  return out;
}

std::string Unhex(std::string_view hex) {
  std::string out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<char>(std::stoi(std::string(hex.substr(i, 2)),
                                              nullptr, 16)));
  }
  return out;
}

request::RequestSpec RandomRequestSpec(std::mt19937& rng) {
  static const std::vector<std::string> kPieces = {
      "a", "Z", "7", "-", "_", " ", ".", "\xc3\xa9", "e\xcc\x81",
      "\xc3\x9f", "\xe4\xb8\xad", "\xf0\x9f\x93\x84", "(", "'", "#",
      "%", "+", "&"};
  static const std::string kSegChars =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-";
  auto piece = [&] { return kPieces[rng() % kPieces.size()]; };
  auto segment = [&] {
    std::string s;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) s += kSegChars[rng() % kSegChars.size()];
    return s;
  };

  std::string name;
  do {
    name.clear();
    const int n = 1 + static_cast<int>(rng() % 24);
    for (int i = 0; i < n; ++i) name += piece();
    name += rng() % 2 ? ".pdf" : "";
  } while (name == "." || name == "..");

  std::vector<AttributeId> ids;
  const int count = 1 + static_cast<int>(rng() % 5);
  while (static_cast<int>(ids.size()) < count) {
    AttributeId id(segment(), segment(), segment(), segment());
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }

  std::optional<std::string> message;
  if (rng() % 2) {
    std::string m;
    const std::size_t len = rng() % 4 == 0 ? request::kMaxMessageChars
                                           : rng() % 80;
    // Single code point pieces only, so the length is exact.
    static const std::vector<std::string> kChars = {
        "a", " ", "\xc3\xa9", "\xe2\x82\xac", "\n", "\"", "\xf0\x9f\x98\x80"};
    for (std::size_t i = 0; i < len; ++i) m += kChars[rng() % kChars.size()];
    message = m;
  }
  return request::RequestSpec::Make(name, ids, message);
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("idsign-test-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++) + "-" + std::to_string(rd()));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

SigningSetup::SigningSetup() {
  attributes = {AttributeValue(Demo("email"), "robin@example.com"),
                AttributeValue(Demo("fullName"), "Robin Stevens")};
}

sig::SignaturePayload SigningSetup::Sign(std::string_view document,
                                         Timestamp at) const {
  const SigningKey signer = SigningKey::Generate();
  const auto cert = sig::IssueCertificate(server_key, server_id,
                                          signer.public_key(), attributes,
                                          "session-test", at);
  return sig::SignDocument(signer, Digest(document), document.size(), cert,
                           at);
}

std::string SigningSetup::SignPdf(std::string_view original,
                                  Timestamp at) const {
  return pdf::Embed(original, Sign(original, at));
}

int FreePort() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd);
    throw std::runtime_error("bind failed");
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

ServerHarness::ServerHarness(session::Clock clock) {
  // The wallet URL in QR payloads embeds the port, so it is chosen first.
  for (int attempt = 0;; ++attempt) {
    const int port = FreePort();
    session::ServiceOptions options;
    options.server_id = "test-server";
    options.issuers[sd::kDemoIssuerId] = sd::DemoIssuerKey().public_key();
    options.base_url = "http://127.0.0.1:" + std::to_string(port);
    service_ = std::make_unique<session::SessionService>(
        options, std::make_unique<session::MemorySessionStore>(), clock);
    server_ = std::make_unique<session::HttpServer>(*service_);
    try {
      server_->Bind("127.0.0.1", port);
    } catch (const Error&) {
      if (attempt >= 5) throw;
      continue;
    }
    base_url_ = options.base_url;
    break;
  }
  thread_ = std::thread([this] { server_->Run(); });
  server_->WaitUntilReady();
}

ServerHarness::~ServerHarness() {
  server_->Stop();
  if (thread_.joinable()) thread_.join();
}

namespace {

std::vector<char*> Argv(const std::vector<std::string>& args) {
  std::vector<char*> out;
  for (const auto& a : args) out.push_back(const_cast<char*>(a.c_str()));
  out.push_back(nullptr);
  return out;
}

std::vector<std::string> MergedEnv(const std::vector<std::string>& extra) {
  std::vector<std::string> env;
  for (char** e = environ; *e != nullptr; ++e) {
    const std::string entry = *e;
    const auto key = entry.substr(0, entry.find('=') + 1);
    const bool overridden =
        std::any_of(extra.begin(), extra.end(), [&](const std::string& x) {
          return x.rfind(key, 0) == 0;
        });
    if (!overridden) env.push_back(entry);
  }
  env.insert(env.end(), extra.begin(), extra.end());
  return env;
}

pid_t Spawn(const std::vector<std::string>& argv,
            const std::vector<std::string>& extra_env, const fs::path& out,
            const fs::path& err) {
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null",
                                   O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, out.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0600);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, err.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0600);
  const auto env = MergedEnv(extra_env);
  auto args = Argv(argv);
  auto envp = Argv(env);
  pid_t pid = -1;
  const int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(),
                              envp.data());
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw std::runtime_error("spawn failed: " + argv[0]);
  return pid;
}

int WaitExit(pid_t pid) {
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) return -1;
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

ProcessResult RunProcess(const std::vector<std::string>& argv,
                         const std::vector<std::string>& extra_env) {
  TempDir dir;
  const pid_t pid = Spawn(argv, extra_env, dir / "out", dir / "err");
  ProcessResult result;
  result.exit_code = WaitExit(pid);
  result.out = ReadFile(dir / "out");
  result.err = ReadFile(dir / "err");
  return result;
}

BackgroundProcess::BackgroundProcess(const std::vector<std::string>& argv,
                                     const fs::path& log_file,
                                     const std::vector<std::string>& extra_env)
    : pid_(Spawn(argv, extra_env, log_file, log_file.string() + ".err")) {}

BackgroundProcess::~BackgroundProcess() { Terminate(); }

int BackgroundProcess::Terminate() {
  if (pid_ <= 0) return -1;
  ::kill(pid_, SIGTERM);
  const int code = WaitExit(pid_);
  pid_ = -1;
  return code;
}

bool WaitForHealth(const std::string& base_url,
                   std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    try {
      const auto r = session::HttpCall("GET", base_url + "/api/v1/health", "",
                                       "application/json",
                                       std::chrono::seconds(1));
      if (r.status == 200) return true;
    } catch (const Error&) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  return false;
}

}  // namespace idsign::testing
