#include "idsign/wallet/wallet.h"

#include <mutex>

#include <gtest/gtest.h>

#include "httplib.h"
#include "idsign/canonical.h"
#include "idsign/error.h"
#include "idsign/session/client.h"
#include "support/testing.h"

namespace idsign::wallet {
namespace {

using testing::Demo;
using testing::ReadFile;
using testing::T0;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIo;
}

TEST(WalletStoreTest, InitDemoFixture) {
  testing::TempDir dir;
  const auto store = WalletStore::Init(Fixture::kDemo, dir / "w.json", T0());
  ASSERT_EQ(store.credentials().size(), 1u);
  const auto& c = store.credentials()[0];
  EXPECT_EQ(c.credential.issuer_id, "demo-issuer");
  ASSERT_EQ(c.secrets.claims.size(), 2u);
  EXPECT_EQ(c.secrets.Find(Demo("fullName"))->claim.value(), "Robin Stevens");
  EXPECT_EQ(c.secrets.Find(Demo("email"))->claim.value(), "robin@example.com");
  EXPECT_EQ(c.credential.expires_at - c.credential.issued_at,
            std::chrono::hours(24 * 365));

  const std::string file = ReadFile(dir / "w.json");
  EXPECT_NO_THROW(ParseCanonical(file));
  EXPECT_TRUE(file.starts_with(R"({"credentials":[{"credential":)"));
  EXPECT_TRUE(file.ends_with(R"(],"v":1})"));
  EXPECT_EQ(WalletStore::Load(dir / "w.json").credentials(), store.credentials());
}

TEST(WalletStoreTest, InitEmptyAndTwice) {
  testing::TempDir dir;
  EXPECT_TRUE(WalletStore::Init(Fixture::kEmpty, dir / "w.json")
                  .credentials()
                  .empty());
  EXPECT_EQ(CodeOf([&] { WalletStore::Init(Fixture::kDemo, dir / "w.json"); }),
            ErrorCode::kStoreExists);
}

TEST(WalletStoreTest, LoadErrors) {
  testing::TempDir dir;
  EXPECT_EQ(CodeOf([&] { WalletStore::Load(dir / "missing.json"); }),
            ErrorCode::kIo);
  testing::WriteFile(dir / "bad.json", "{");
  EXPECT_EQ(CodeOf([&] { WalletStore::Load(dir / "bad.json"); }),
            ErrorCode::kStoreCorrupt);

  WalletStore::Init(Fixture::kDemo, dir / "w.json");
  std::string file = ReadFile(dir / "w.json");
  const std::size_t pos = file.find("Robin Stevens");
  file.replace(pos, 13, "Robin Stevenz");
  testing::WriteFile(dir / "tampered.json", file);
  EXPECT_EQ(CodeOf([&] { WalletStore::Load(dir / "tampered.json"); }),
            ErrorCode::kStoreCorrupt);
}

// Sits between wallet and server and records every request body.
class CaptureProxy {
 public:
  explicit CaptureProxy(std::string upstream) : upstream_(std::move(upstream)) {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mu_);
        captured_ += req.method + " " + req.path + "\n" + req.body + "\n";
      }
      const auto r = session::HttpCall(req.method, upstream_ + req.path,
                                       req.body);
      res.status = r.status;
      res.set_content(r.body, "application/json");
    };
    server_.Get(".*", forward);
    server_.Post(".*", forward);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~CaptureProxy() {
    server_.stop();
    thread_.join();
  }

  // Rewrites a QR URL so that the wallet talks to the proxy.
  session::QrPayload Route(const session::QrPayload& qr) const {
    session::QrPayload out = qr;
    out.u = "http://127.0.0.1:" + std::to_string(port_) +
            qr.u.substr(upstream_.size());
    return out;
  }
  std::string captured() {
    std::lock_guard lock(mu_);
    return captured_;
  }

 private:
  std::string upstream_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::string captured_;
};

class WalletFlowTest : public ::testing::Test {
 protected:
  WalletFlowTest()
      : clock_(Timestamp::Now()),
        server_(clock_.AsClock()),
        store_(WalletStore::Init(Fixture::kDemo, dir_ / "w.json",
                                 clock_.now() - std::chrono::hours(1))) {}

  session::CreatedSession Create(std::vector<AttributeId> ids) {
    return server_.service().Create(std::move(ids), Digest("pdf"),
                                    signer_.public_key().ToBase64Url());
  }

  testing::TempDir dir_;
  testing::FakeClock clock_;
  testing::ServerHarness server_;
  WalletStore store_;
  SigningKey signer_ = SigningKey::Generate();
};

TEST_F(WalletFlowTest, ApproveRevealsOnlyRequestedClaims) {
  CaptureProxy proxy(server_.base_url());
  const auto created = Create({Demo("fullName")});
  const auto prompt = Scan(store_, proxy.Route(created.qr));
  EXPECT_TRUE(prompt.resolvable);
  EXPECT_EQ(prompt.requested_attributes,
            std::vector<AttributeId>{Demo("fullName")});
  EXPECT_NE(prompt.ToText(store_).find("fullName: Robin Stevens"),
            std::string::npos);
  const auto receipt = Approve(store_, prompt);
  EXPECT_EQ(receipt.cert.attributes.size(), 1u);
  EXPECT_EQ(server_.service().Inspect(created.session_id)->state,
            session::State::kDisclosed);

  const std::string wire = proxy.captured();
  const auto& secrets = store_.credentials()[0].secrets;
  EXPECT_NE(wire.find("Robin Stevens"), std::string::npos);
  EXPECT_NE(wire.find(secrets.Find(Demo("fullName"))->salt), std::string::npos);
  EXPECT_EQ(wire.find("robin@example.com"), std::string::npos);
  EXPECT_EQ(wire.find(secrets.Find(Demo("email"))->salt), std::string::npos);
}

TEST_F(WalletFlowTest, UnresolvableRequest) {
  const auto created = Create({Demo("address"), Demo("fullName")});
  const auto prompt = Scan(store_, created.qr);
  EXPECT_FALSE(prompt.resolvable);
  EXPECT_EQ(prompt.missing, std::vector<AttributeId>{Demo("address")});
  EXPECT_EQ(CodeOf([&] { Approve(store_, prompt); }), ErrorCode::kNotResolvable);
  EXPECT_EQ(CodeOf([&] { BuildDisclosure(store_, prompt); }),
            ErrorCode::kNotResolvable);
}

TEST_F(WalletFlowTest, ApproveAfterExpiryIsRejected) {
  const auto created = Create({Demo("email")});
  const auto prompt = Scan(store_, created.qr);
  clock_.Advance(session::kSessionLifetime);
  try {
    Approve(store_, prompt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kServerRejected);
    EXPECT_EQ(e.detail(), "expired");
  }
}

TEST_F(WalletFlowTest, DenyLeavesSessionToExpire) {
  const auto created = Create({Demo("email")});
  const auto prompt = Scan(store_, created.qr);
  Deny(prompt);
  EXPECT_EQ(server_.service().Inspect(created.session_id)->state,
            session::State::kWalletConnected);
  clock_.Advance(session::kSessionLifetime);
  const auto poll =
      server_.service().Poll(created.session_id, created.client_token);
  EXPECT_EQ(poll.state, session::State::kExpired);
  EXPECT_FALSE(poll.cert);
}

TEST_F(WalletFlowTest, ScanErrors) {
  session::QrPayload unknown;
  unknown.u = server_.base_url() + "/api/v1/session/w/AAAAAAAAAAAAAAAAAAAAAA";
  EXPECT_EQ(CodeOf([&] { Scan(store_, unknown); }), ErrorCode::kUnknownToken);

  const auto created = Create({Demo("email")});
  Scan(store_, created.qr);
  try {
    Scan(store_, created.qr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kServerRejected);
    EXPECT_EQ(e.detail(), "wrong_state");
  }
}

TEST(WalletNetworkTest, DeadServer) {
  testing::TempDir dir;
  const auto store = WalletStore::Init(Fixture::kDemo, dir / "w.json");
  session::QrPayload qr;
  qr.u = "http://127.0.0.1:" + std::to_string(testing::FreePort()) +
         "/api/v1/session/w/abc";
  EXPECT_EQ(CodeOf([&] { Scan(store, qr); }), ErrorCode::kNetworkError);
}

}  // namespace
}  // namespace idsign::wallet
