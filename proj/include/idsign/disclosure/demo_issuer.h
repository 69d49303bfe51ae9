#ifndef IDSIGN_DISCLOSURE_DEMO_ISSUER_H_
#define IDSIGN_DISCLOSURE_DEMO_ISSUER_H_

#include <string>
#include <vector>

#include "idsign/attribute.h"
#include "idsign/crypto.h"

// The demo issuer ships with the repository so that wallets and servers can
// be set up without a real identity provider. Its private key is public
// knowledge: never trust it outside local testing.
namespace idsign::sd {

inline constexpr char kDemoIssuerId[] = "demo-issuer";
inline constexpr char kDemoIssuerSeed[] =
    "v1etsUv-X_Fsk7a_YNkOjIeo47E93LvYlbAdv176-V0";
// Prefix of the demo credential's attribute ids.
inline constexpr char kDemoCredentialPrefix[] = "demo.demo-issuer.id-card.";

SigningKey DemoIssuerKey();

// fullName="Robin Stevens", email="robin@example.com".
std::vector<AttributeValue> DemoClaims();

}  // namespace idsign::sd

#endif  // IDSIGN_DISCLOSURE_DEMO_ISSUER_H_
