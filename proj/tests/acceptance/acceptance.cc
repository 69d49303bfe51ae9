// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "idsign/disclosure/credential.h"
#include "idsign/error.h"
#include "idsign/pdf/container.h"
#include "idsign/request/request.h"
#include "support/session_model.h"
#include "support/testing.h"

namespace idsign::acceptance {
namespace {

using nlohmann::json;
using testing::FixturePath;
using testing::ReadFile;
using testing::WriteFile;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome Fail(std::string detail) { return {false, std::move(detail)}; }

bool Contains(std::string_view hay, std::string_view needle) {
  return hay.find(needle) != std::string_view::npos;
}

bool HasAttribute(const json& report, const std::string& name,
                  const std::string& value) {
  for (const auto& a : report.value("signer_attributes", json::array())) {
    const std::string id = a.value("id", "");
    if (id.ends_with("." + name) && a.value("value", "") == value) return true;
  }
  return false;
}

bool HasWarning(const json& report, const std::string& code) {
  for (const auto& w : report.value("warnings", json::array())) {
    if (w == code) return true;
  }
  return false;
}

// A key server and a demo wallet driven through the idsign binary.
class CliWorld {
 public:
  CliWorld()
      : port_(testing::FreePort()),
        base_url_("http://127.0.0.1:" + std::to_string(port_)),
        server_({IDSIGN_BINARY, "serve", "--config",
                 (dir_ / "server.json").string(), "--port",
                 std::to_string(port_), "--quiet"},
                dir_ / "server.log") {
    ready_ = testing::WaitForHealth(base_url_, std::chrono::seconds(10));
  }

  bool ready() const { return ready_; }
  const testing::TempDir& dir() const { return dir_; }
  std::string wallet() const { return (dir_ / "wallet.json").string(); }

  testing::ProcessResult Idsign(std::vector<std::string> args) const {
    args.insert(args.begin(), IDSIGN_BINARY);
    return testing::RunProcess(args);
  }

  testing::ProcessResult Sign(const std::string& input,
                              const std::string& attrs,
                              const std::string& output) const {
    return Idsign({"sign", input, "--attrs", attrs, "--auto-approve",
                   "--wallet", wallet(), "--server", base_url_, "-o", output});
  }

  testing::ProcessResult Verify(const std::string& file) const {
    return Idsign({"verify", file, "--json", "--server", base_url_});
  }

 private:
  testing::TempDir dir_;
  int port_;
  std::string base_url_;
  testing::BackgroundProcess server_;
  bool ready_ = false;
};

CliWorld& World() {
  static CliWorld world;
  return world;
}

Outcome EndToEndReplay() {
  const auto start = std::chrono::steady_clock::now();
  CliWorld& w = World();
  if (!w.ready()) return Fail("key server did not become healthy");
  const auto init = w.Idsign({"wallet", "init", "--wallet", w.wallet()});
  if (init.exit_code != 0) return Fail("wallet init: " + init.err);

  const std::string out = (w.dir() / "one-page-signed.pdf").string();
  const auto sign =
      w.Sign(FixturePath("one-page.pdf").string(), "fullName,email", out);
  if (sign.exit_code != 0) {
    return Fail("sign exited " + std::to_string(sign.exit_code) + ": " +
                sign.err);
  }
  const auto verify = w.Verify(out);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  if (verify.exit_code != 0) {
    return Fail("verify exited " + std::to_string(verify.exit_code));
  }
  const auto report = json::parse(verify.out);
  if (report["status"] != "INTACT_SIGNATURE") return Fail("status not intact");
  if (!HasAttribute(report, "fullName", "Robin Stevens") ||
      !HasAttribute(report, "email", "robin@example.com")) {
    return Fail("signer attributes missing: " + verify.out);
  }
  std::ostringstream detail;
  detail.precision(2);
  detail << std::fixed << "sign+verify " << seconds << " s";
  if (seconds >= 5.0) return Fail(detail.str() + " (limit 5 s)");
  return {true, detail.str()};
}

Outcome TamperSuite() {
  testing::SigningSetup setup;
  const std::string original = ReadFile(FixturePath("one-page.pdf"));
  const std::string signed_pdf = setup.SignPdf(original, testing::T0());
  const auto region = pdf::Extract(signed_pdf).region;
  const auto now = testing::T0() + std::chrono::hours(1);
  if (!pdf::VerifyFile(signed_pdf, setup.roots(), now).intact()) {
    return Fail("unmodified file is not intact");
  }

  struct Range {
    const char* name;
    std::size_t begin;
    std::size_t end;
  };
  const Range ranges[] = {
      {"original", 0, original.size()},
      {"overlay", region.overlay_offset,
       region.overlay_offset + region.overlay_length},
      {"block", region.block_offset, region.block_offset + region.block_length},
  };
  constexpr int kPerRange = 400;
  std::mt19937 rng(20240501);
  int intact = 0;
  int original_wrong_reason = 0;
  int total = 0;
  for (const Range& r : ranges) {
    std::uniform_int_distribution<std::size_t> pos(r.begin, r.end - 1);
    for (int i = 0; i < kPerRange; ++i) {
      std::string m = signed_pdf;
      const std::size_t at = pos(rng);
      m[at] = static_cast<char>(m[at] ^ (1 + rng() % 255));
      const auto report = pdf::VerifyFile(m, setup.roots(), now);
      ++total;
      if (report.intact()) ++intact;
      if (r.begin == 0 &&
          (report.status != sig::VerificationStatus::kInvalidSignature ||
           report.failure_reason != "document hash mismatch")) {
        ++original_wrong_reason;
      }
    }
  }
  const std::string detail = std::to_string(total) + " mutations, " +
                             std::to_string(intact) + " intact, " +
                             std::to_string(original_wrong_reason) +
                             " original-range without hash mismatch";
  return {intact == 0 && original_wrong_reason == 0 && total >= 1000, detail};
}

std::string RandomText(std::mt19937& rng, int length) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  std::string s;
  for (int i = 0; i < length; ++i) s += kAlphabet[rng() % (sizeof kAlphabet - 1)];
  return s;
}

Outcome DisclosureHidingAndSoundness() {
  std::mt19937 rng(7);
  const SigningKey issuer = SigningKey::Generate();
  const sd::IssuerRegistry registry{{"acme-issuer", issuer.public_key()}};
  const auto t0 = testing::T0();
  long leaks = 0;
  long accepted_mutations = 0;
  long mutations = 0;
  long honest_rejected = 0;
  for (int c = 0; c < 100; ++c) {
    const int n = 2 + static_cast<int>(rng() % 7);
    std::vector<AttributeValue> claims;
    for (int i = 0; i < n; ++i) {
      claims.emplace_back(
          AttributeId("acme", "acme-issuer", "card", "attr" + std::to_string(i)),
          "v-" + RandomText(rng, 24));
    }
    const auto issued = sd::IssueCredential(
        issuer, "acme-issuer", claims, {t0, t0 + std::chrono::hours(24)});

    std::vector<AttributeId> requested;
    std::vector<const sd::ClaimSecret*> hidden;
    for (const auto& s : issued.secrets.claims) {
      if (requested.empty() || rng() % 2 == 0) {
        requested.push_back(s.claim.id());
      } else {
        hidden.push_back(&s);
      }
    }
    if (hidden.empty()) {
      hidden.push_back(&issued.secrets.claims.back());
      requested.pop_back();
    }

    const auto d = sd::MakeDisclosure(issued.credential, issued.secrets, requested);
    const std::string bytes = d.Serialize();
    const std::string wire = d.ToJson().dump();
    for (const auto* s : hidden) {
      for (const std::string& secret : {s->claim.value(), s->salt}) {
        if (Contains(bytes, secret) || Contains(wire, secret)) ++leaks;
      }
    }
    try {
      sd::VerifyDisclosure(sd::Disclosure::Parse(bytes), registry, t0);
    } catch (const Error&) {
      ++honest_rejected;
    }

    // The first credentials get every alternative byte value at every
    // offset, the rest one random alternative per offset.
    const bool exhaustive = c < 2;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      const int variants = exhaustive ? 255 : 1;
      for (int v = 0; v < variants; ++v) {
        std::string m = bytes;
        const int delta = exhaustive ? v + 1 : 1 + static_cast<int>(rng() % 255);
        m[i] = static_cast<char>(m[i] ^ delta);
        ++mutations;
        try {
          sd::VerifyDisclosure(sd::Disclosure::Parse(m), registry, t0);
          ++accepted_mutations;
        } catch (const Error&) {
        }
      }
    }
  }
  const std::string detail =
      "100 credentials, " + std::to_string(leaks) + " leaked secrets, " +
      std::to_string(mutations) + " mutations, " +
      std::to_string(accepted_mutations) + " accepted";
  return {leaks == 0 && accepted_mutations == 0 && honest_rejected == 0,
          detail};
}

Outcome SessionModel() {
  const auto stats = testing::RunSessionModel(424242, 10000);
  std::string detail = std::to_string(stats.sequences) + " sequences, " +
                       std::to_string(stats.calls) + " calls, " +
                       std::to_string(stats.transitions) + " transitions, " +
                       std::to_string(stats.certificates) + " certificates";
  if (!stats.ok()) detail += "; " + stats.first_problem;
  return {stats.ok() && stats.sequences == 10000, detail};
}

Outcome CertificateFixture() {
  CliWorld& w = World();
  if (!w.ready()) return Fail("key server did not become healthy");
  if (!std::filesystem::exists(w.wallet())) {
    w.Idsign({"wallet", "init", "--wallet", w.wallet()});
  }
  const std::string out = (w.dir() / "certificate-signed.pdf").string();
  const auto sign = w.Sign(FixturePath("electrician-certificate.pdf").string(),
                           "fullName", out);
  if (sign.exit_code != 0) return Fail("sign: " + sign.err);
  const auto verify = w.Verify(out);
  if (verify.exit_code != 0) {
    return Fail("verify exited " + std::to_string(verify.exit_code));
  }
  const auto report = json::parse(verify.out);
  if (report["status"] != "INTACT_SIGNATURE") return Fail("status not intact");
  if (!HasAttribute(report, "fullName", "Robin Stevens")) {
    return Fail("signer name absent from report");
  }
  if (!HasWarning(report, "UNSIGNED_OVERLAY_PRESENT")) {
    return Fail("UNSIGNED_OVERLAY_PRESENT absent: " + verify.out);
  }
  return {true, "INTACT, signer fullName=Robin Stevens, warnings " +
                    report["warnings"].dump()};
}

Outcome RequestLinks() {
  std::mt19937 rng(1000);
  int mismatched = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto spec = testing::RandomRequestSpec(rng);
    const std::string url = request::EncodeRequest(spec, "https://sign.example");
    const std::string token = url.substr(url.rfind('#') + 1);
    if (!(request::DecodeRequest(url) == spec) ||
        !(request::DecodeRequest(token) == spec)) {
      ++mismatched;
    }
  }

  const auto spec = request::RequestSpec::Make(
      "sales-agreement.pdf",
      {testing::Demo("fullName"), testing::Demo("email")}, "Sign by Friday");
  const auto decoded =
      request::DecodeRequest(request::EncodeRequest(spec, "http://x"));
  const auto wrong_file = request::ValidateAgainstRequest(
      decoded, "sales-agreement (1).pdf",
      {testing::Demo("fullName"), testing::Demo("email")});
  const auto missing = request::ValidateAgainstRequest(
      decoded, "sales-agreement.pdf", {testing::Demo("fullName")});
  const auto satisfied = request::ValidateAgainstRequest(
      decoded, "sales-agreement.pdf",
      {testing::Demo("email"), testing::Demo("fullName"),
       testing::Demo("address")});

  const bool file_ok =
      wrong_file.size() == 1 &&
      wrong_file[0].code == request::ViolationCode::kFileNameMismatch;
  const bool missing_ok =
      missing.size() == 1 &&
      missing[0].code == request::ViolationCode::kMissingAttribute &&
      missing[0].attribute == testing::Demo("email");
  std::string detail = "1000 specs, " + std::to_string(mismatched) +
                       " round-trip mismatches; targeted: ";
  detail += wrong_file.empty() ? "none" : wrong_file[0].ToString();
  detail += ", ";
  detail += missing.empty() ? "none" : missing[0].ToString();
  return {mismatched == 0 && file_ok && missing_ok && satisfied.empty(), detail};
}

Outcome ContainerRoundTrip() {
  testing::SigningSetup setup;
  testing::TempDir out_dir;
  const auto now = testing::T0() + std::chrono::hours(1);
  std::vector<std::string> args = {IDSIGN_PYTHON, IDSIGN_RENDER_CHECK,
                                   "--expect",
                                   "Digitally signed with IdentitySign"};
  int files = 0;
  for (const auto& path : testing::CorpusFiles()) {
    const std::string original = ReadFile(path);
    const std::string signed_pdf = setup.SignPdf(original, testing::T0());
    if (pdf::ExtractOriginal(signed_pdf) != original) {
      return Fail(path.filename().string() + ": extracted bytes differ");
    }
    if (!pdf::VerifyFile(signed_pdf, setup.roots(), now).intact()) {
      return Fail(path.filename().string() + ": not intact");
    }
    const auto out = out_dir / path.filename().string();
    WriteFile(out, signed_pdf);
    args.push_back(out.string());
    ++files;
  }
  if (files < 10) return Fail("corpus has only " + std::to_string(files));
  const auto render = testing::RunProcess(args);
  if (render.exit_code != 0) {
    return Fail("renderer check failed:\n" + render.out + render.err);
  }
  return {true, std::to_string(files) +
                    " PDFs byte-identical after extract; PDFium and MuPDF "
                    "render all pages"};
}

}  // namespace
}  // namespace idsign::acceptance

int main() {
  using namespace idsign::acceptance;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria =
      {
          {"end-to-end sign and verify through the CLI", EndToEndReplay},
          {"tamper suite", TamperSuite},
          {"selective disclosure hiding and soundness",
           DisclosureHidingAndSoundness},
          {"session state machine model", SessionModel},
          {"self-signed certificate fixture exposes signer and overlay",
           CertificateFixture},
          {"request link round trip and enforcement", RequestLinks},
          {"container round trip over the corpus", ContainerRoundTrip},
      };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = Fail(std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
