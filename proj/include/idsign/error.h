#ifndef IDSIGN_ERROR_H_
#define IDSIGN_ERROR_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace idsign {

// Every failure that crosses a module boundary carries one of these codes.
// Verification paths never throw; they report through VerificationReport.
enum class ErrorCode {
  // core-model
  kNonCanonicalizable,
  kMalformedAttributeId,
  kInvalidAttributeValue,
  kMalformedTimestamp,
  kBadEncoding,
  kInvalidKey,
  // selective-disclosure
  kDuplicateAttribute,
  kEmptyClaims,
  kBadValidity,
  kUnknownAttribute,
  kEmptyRequest,
  kUnknownIssuer,
  kExpiredCredential,
  kNotYetValid,
  kCommitmentMismatch,
  kBadIssuerSignature,
  kMalformedCredential,
  // signature-engine
  kEmptyAttributes,
  kCertificateWindowViolation,
  kKeyMismatch,
  kMalformedPayload,
  // pdf-container
  kNotAPdf,
  kAlreadySigned,
  kHashMismatch,
  kNoSignature,
  kCorruptBlock,
  kUnsupportedPdf,
  kMalformedPdf,
  kInvalidBanner,
  // request-link
  kInvalidSpec,
  kMalformedToken,
  kUnsupportedVersion,
  // session-service
  kUnknownToken,
  kWrongState,
  kExpired,
  kDisclosureInvalid,
  kAttributesInsufficient,
  kUnknownSession,
  kBadToken,
  kBadRequest,
  // wallet-sim
  kStoreExists,
  kStoreCorrupt,
  kNetworkError,
  kNotResolvable,
  kServerRejected,
  // plumbing
  kIo,
  kConfig,
};

// Stable snake_case name, used in HTTP error bodies and CLI output.
std::string_view ErrorCodeName(ErrorCode code);
// Inverse of ErrorCodeName.
std::optional<ErrorCode> ErrorCodeFromName(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace idsign

#endif  // IDSIGN_ERROR_H_
