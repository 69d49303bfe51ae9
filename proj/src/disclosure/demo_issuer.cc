#include "idsign/disclosure/demo_issuer.h"

namespace idsign::sd {

SigningKey DemoIssuerKey() {
  return SigningKey::FromSeedBase64Url(kDemoIssuerSeed);
}

std::vector<AttributeValue> DemoClaims() {
  const std::string prefix = kDemoCredentialPrefix;
  return {
      AttributeValue(AttributeId::Parse(prefix + "email"),
                     "robin@example.com"),
      AttributeValue(AttributeId::Parse(prefix + "fullName"), "Robin Stevens"),
  };
}

}  // namespace idsign::sd
