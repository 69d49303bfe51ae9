#include "idsign/session/service.h"

#include <atomic>
#include <thread>

#include <gtest/gtest.h>

#include "idsign/disclosure/demo_issuer.h"
#include "idsign/error.h"
#include "idsign/session/store.h"
#include "support/session_model.h"
#include "support/testing.h"

namespace idsign::session {
namespace {

using testing::Demo;
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

std::string WalletToken(const CreatedSession& c) {
  return c.qr.u.substr(c.qr.u.rfind('/') + 1);
}

TEST(StateTest, TransitionTable) {
  EXPECT_TRUE(IsLegalTransition(State::kCreated, State::kWalletConnected));
  EXPECT_TRUE(IsLegalTransition(State::kWalletConnected, State::kDisclosed));
  EXPECT_TRUE(IsLegalTransition(State::kDisclosed, State::kCompleted));
  for (State s : {State::kCreated, State::kWalletConnected, State::kDisclosed}) {
    EXPECT_TRUE(IsLegalTransition(s, State::kCancelled));
    EXPECT_TRUE(IsLegalTransition(s, State::kExpired));
    EXPECT_FALSE(IsTerminal(s));
  }
  for (State s : {State::kCompleted, State::kCancelled, State::kExpired}) {
    EXPECT_TRUE(IsTerminal(s));
    for (State to : {State::kCreated, State::kWalletConnected, State::kDisclosed,
                     State::kCompleted, State::kCancelled, State::kExpired}) {
      EXPECT_FALSE(IsLegalTransition(s, to));
    }
  }
  EXPECT_FALSE(IsLegalTransition(State::kCreated, State::kDisclosed));
  EXPECT_FALSE(IsLegalTransition(State::kCreated, State::kCompleted));
  EXPECT_FALSE(IsLegalTransition(State::kWalletConnected, State::kCompleted));
  EXPECT_EQ(StateName(State::kWalletConnected), "WALLET_CONNECTED");
  EXPECT_EQ(ParseState("DISCLOSED"), State::kDisclosed);
  EXPECT_THROW(ParseState("disclosed"), Error);
}

TEST(QrPayloadTest, ParsesJsonAndBareUrl) {
  const auto a = QrPayload::Parse(R"({"u":"http://h/api/v1/session/w/t","v":"idsign-1"})");
  EXPECT_EQ(a.u, "http://h/api/v1/session/w/t");
  EXPECT_EQ(QrPayload::Parse(" https://h/x \n").u, "https://h/x");
  EXPECT_THROW(QrPayload::Parse(R"({"u":"http://h","v":"idsign-2"})"), Error);
  EXPECT_THROW(QrPayload::Parse("ftp://h"), Error);
  EXPECT_THROW(QrPayload::Parse("{"), Error);
  EXPECT_EQ(QrPayload::Parse(a.ToJson().dump()), a);
}

class ServiceTest : public ::testing::Test {
 protected:
  ServiceTest() {
    ServiceOptions options;
    options.server_id = "ks";
    options.issuers[sd::kDemoIssuerId] = sd::DemoIssuerKey().public_key();
    options.base_url = "http://127.0.0.1:8470/";
    service_ = std::make_unique<SessionService>(
        std::move(options), std::make_unique<MemorySessionStore>(),
        clock_.AsClock());
    issued_ = sd::IssueCredential(sd::DemoIssuerKey(), sd::kDemoIssuerId,
                                  sd::DemoClaims(),
                                  {T0() - std::chrono::hours(1),
                                   T0() + std::chrono::hours(1000)});
  }

  CreatedSession Create(std::vector<AttributeId> ids = {Demo("fullName")}) {
    return service_->Create(std::move(ids), Digest("doc"), signer_);
  }

  sd::Disclosure Disclose(std::vector<AttributeId> ids) {
    return sd::MakeDisclosure(issued_.credential, issued_.secrets, ids);
  }

  testing::FakeClock clock_;
  std::unique_ptr<SessionService> service_;
  sd::IssuedCredential issued_;
  std::string signer_ = SigningKey::Generate().public_key().ToBase64Url();
};

TEST_F(ServiceTest, HappyPath) {
  std::vector<std::pair<State, State>> seen;
  service_->SetObserver([&](const std::string&, State from, State to) {
    seen.emplace_back(from, to);
  });
  const auto c = Create({Demo("fullName"), Demo("email")});
  EXPECT_EQ(c.qr.u, "http://127.0.0.1:8470/api/v1/session/w/" + WalletToken(c));
  EXPECT_EQ(c.qr.v, "idsign-1");
  EXPECT_EQ(c.expires_at, T0() + kSessionLifetime);
  EXPECT_EQ(c.server_id, "ks");

  const auto req = service_->WalletFetch(WalletToken(c));
  EXPECT_EQ(req.doc_hash, Digest("doc"));
  EXPECT_EQ(req.display_hint,
            "Share email, fullName to sign the document with fingerprint " +
                Digest("doc").substr(0, 16));

  EXPECT_EQ(service_->Poll(c.session_id, c.client_token).state,
            State::kWalletConnected);
  const auto cert = service_->WalletDisclose(
      WalletToken(c), Disclose({Demo("fullName"), Demo("email")}));
  EXPECT_EQ(cert.signer_pubkey, signer_);
  EXPECT_EQ(cert.session_id, c.session_id);

  const auto first = service_->Poll(c.session_id, c.client_token);
  EXPECT_EQ(first.state, State::kCompleted);
  ASSERT_TRUE(first.cert);
  EXPECT_EQ(*first.cert, cert);
  const auto second = service_->Poll(c.session_id, c.client_token);
  EXPECT_EQ(second.state, State::kCompleted);
  EXPECT_FALSE(second.cert);

  ASSERT_EQ(seen.size(), 3u);
  EXPECT_EQ(seen[2], std::make_pair(State::kDisclosed, State::kCompleted));
}

TEST_F(ServiceTest, CertificateCarriesOnlyRequestedAttributes) {
  const auto c = Create({Demo("fullName")});
  service_->WalletFetch(WalletToken(c));
  const auto cert = service_->WalletDisclose(
      WalletToken(c), Disclose({Demo("fullName"), Demo("email")}));
  ASSERT_EQ(cert.attributes.size(), 1u);
  EXPECT_EQ(cert.attributes[0].value(), "Robin Stevens");
}

TEST_F(ServiceTest, CreateErrors) {
  EXPECT_EQ(CodeOf([&] { service_->Create({}, Digest("d"), signer_); }),
            ErrorCode::kEmptyRequest);
  EXPECT_EQ(CodeOf([&] {
              service_->Create({Demo("a"), Demo("a")}, Digest("d"), signer_);
            }),
            ErrorCode::kDuplicateAttribute);
  EXPECT_EQ(CodeOf([&] { service_->Create({Demo("a")}, "abc", signer_); }),
            ErrorCode::kBadRequest);
  EXPECT_EQ(CodeOf([&] { service_->Create({Demo("a")}, Digest("d"), "AAAA"); }),
            ErrorCode::kInvalidKey);
}

TEST_F(ServiceTest, DisclosureFailures) {
  const auto c = Create({Demo("fullName"), Demo("email")});
  EXPECT_EQ(CodeOf([&] {
              service_->WalletDisclose(WalletToken(c), Disclose({Demo("email")}));
            }),
            ErrorCode::kWrongState);
  service_->WalletFetch(WalletToken(c));
  EXPECT_EQ(CodeOf([&] { service_->WalletFetch(WalletToken(c)); }),
            ErrorCode::kWrongState);
  EXPECT_EQ(CodeOf([&] {
              service_->WalletDisclose(WalletToken(c), Disclose({Demo("email")}));
            }),
            ErrorCode::kAttributesInsufficient);
  auto forged = Disclose({Demo("email"), Demo("fullName")});
  forged.revealed[1].value = "Mallory";
  try {
    service_->WalletDisclose(WalletToken(c), forged);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDisclosureInvalid);
    EXPECT_EQ(e.detail(), "commitment mismatch");
  }
  const auto other_issuer = sd::IssueCredential(
      SigningKey::Generate(), sd::kDemoIssuerId, sd::DemoClaims(),
      {T0() - std::chrono::hours(1), T0() + std::chrono::hours(1)});
  try {
    service_->WalletDisclose(
        WalletToken(c),
        sd::MakeDisclosure(other_issuer.credential, other_issuer.secrets,
                           {Demo("email"), Demo("fullName")}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDisclosureInvalid);
    EXPECT_EQ(e.detail(), "bad issuer signature");
  }
  EXPECT_EQ(service_->Inspect(c.session_id)->state, State::kWalletConnected);
}

TEST_F(ServiceTest, ExpiryIsLazyAndSwept) {
  const auto a = Create();
  const auto b = Create();
  clock_.Advance(kSessionLifetime - std::chrono::seconds(1));
  EXPECT_NO_THROW(service_->WalletFetch(WalletToken(a)));
  clock_.Advance(std::chrono::seconds(1));
  EXPECT_EQ(CodeOf([&] {
              service_->WalletDisclose(WalletToken(a),
                                       Disclose({Demo("fullName")}));
            }),
            ErrorCode::kExpired);
  EXPECT_EQ(service_->Poll(a.session_id, a.client_token).state, State::kExpired);
  EXPECT_EQ(service_->ExpireSessions(clock_.now()), 1u);  // b
  EXPECT_EQ(service_->Inspect(b.session_id)->state, State::kExpired);

  EXPECT_EQ(service_->PurgeClosed(clock_.now()), 0u);
  clock_.Advance(std::chrono::seconds(1));
  EXPECT_EQ(service_->PurgeClosed(clock_.now()), 2u);
  EXPECT_EQ(CodeOf([&] { service_->Poll(a.session_id, a.client_token); }),
            ErrorCode::kUnknownSession);
}

TEST_F(ServiceTest, CancelAndCapabilities) {
  const auto c = Create();
  EXPECT_EQ(CodeOf([&] { service_->Cancel(c.session_id, WalletToken(c)); }),
            ErrorCode::kBadToken);
  EXPECT_EQ(CodeOf([&] { service_->WalletFetch(c.client_token); }),
            ErrorCode::kUnknownToken);
  EXPECT_EQ(CodeOf([&] { service_->WalletFetch(c.session_id); }),
            ErrorCode::kUnknownToken);
  service_->Cancel(c.session_id, c.client_token);
  EXPECT_EQ(service_->Inspect(c.session_id)->state, State::kCancelled);
  service_->Cancel(c.session_id, c.client_token);  // no-op
  EXPECT_EQ(CodeOf([&] { service_->WalletFetch(WalletToken(c)); }),
            ErrorCode::kWrongState);
}

TEST_F(ServiceTest, ConcurrentPollsDeliverOneCertificate) {
  for (int round = 0; round < 20; ++round) {
    const auto c = Create();
    service_->WalletFetch(WalletToken(c));
    service_->WalletDisclose(WalletToken(c), Disclose({Demo("fullName")}));
    std::atomic<int> delivered{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&] {
        if (service_->Poll(c.session_id, c.client_token).cert) ++delivered;
      });
    }
    for (auto& t : threads) t.join();
    ASSERT_EQ(delivered.load(), 1);
  }
}

TEST(SessionRecordTest, JsonRoundTrip) {
  SessionRecord r;
  r.session_id = "s";
  r.wallet_token = "w";
  r.client_token = "c";
  r.requested_attributes = {Demo("email")};
  r.doc_hash = Digest("x");
  r.signer_pubkey = SigningKey::Generate().public_key().ToBase64Url();
  r.state = State::kCompleted;
  r.created_at = T0();
  r.closed_at = T0() + std::chrono::seconds(3);
  testing::SigningSetup setup;
  r.cert = setup.Sign("x", T0()).cert;
  EXPECT_EQ(SessionRecord::FromJson(r.ToJson()), r);
}

TEST(FileSessionStoreTest, PersistsAcrossInstances) {
  testing::TempDir dir;
  const auto path = dir / "sessions.json";
  SessionRecord r;
  r.session_id = "s1";
  r.wallet_token = "w1";
  r.client_token = "c1";
  r.requested_attributes = {Demo("email")};
  r.doc_hash = Digest("x");
  r.signer_pubkey = SigningKey::Generate().public_key().ToBase64Url();
  r.created_at = T0();
  {
    FileSessionStore store(path);
    store.Put(r);
  }
  FileSessionStore reopened(path);
  EXPECT_EQ(reopened.Get("s1"), r);
  EXPECT_EQ(reopened.FindByWalletToken("w1"), r);
  reopened.Erase("s1");
  EXPECT_TRUE(FileSessionStore(path).Ids().empty());
}

TEST(SessionModelTest, RandomSequencesMatchModel) {
  const auto stats = testing::RunSessionModel(99, 500);
  EXPECT_TRUE(stats.ok()) << stats.first_problem;
  EXPECT_GT(stats.certificates, 50);
}

}  // namespace
}  // namespace idsign::session
