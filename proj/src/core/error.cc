#include "idsign/error.h"

namespace idsign {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonCanonicalizable: return "non_canonicalizable";
    case ErrorCode::kMalformedAttributeId: return "malformed_attribute_id";
    case ErrorCode::kInvalidAttributeValue: return "invalid_attribute_value";
    case ErrorCode::kMalformedTimestamp: return "malformed_timestamp";
    case ErrorCode::kBadEncoding: return "bad_encoding";
    case ErrorCode::kInvalidKey: return "invalid_key";
    case ErrorCode::kDuplicateAttribute: return "duplicate_attribute";
    case ErrorCode::kEmptyClaims: return "empty_claims";
    case ErrorCode::kBadValidity: return "bad_validity";
    case ErrorCode::kUnknownAttribute: return "unknown_attribute";
    case ErrorCode::kEmptyRequest: return "empty_request";
    case ErrorCode::kUnknownIssuer: return "unknown_issuer";
    case ErrorCode::kExpiredCredential: return "expired_credential";
    case ErrorCode::kNotYetValid: return "not_yet_valid";
    case ErrorCode::kCommitmentMismatch: return "commitment_mismatch";
    case ErrorCode::kBadIssuerSignature: return "bad_issuer_signature";
    case ErrorCode::kMalformedCredential: return "malformed_credential";
    case ErrorCode::kEmptyAttributes: return "empty_attributes";
    case ErrorCode::kCertificateWindowViolation:
      return "certificate_window_violation";
    case ErrorCode::kKeyMismatch: return "key_mismatch";
    case ErrorCode::kMalformedPayload: return "malformed_payload";
    case ErrorCode::kNotAPdf: return "not_a_pdf";
    case ErrorCode::kAlreadySigned: return "already_signed";
    case ErrorCode::kHashMismatch: return "hash_mismatch";
    case ErrorCode::kNoSignature: return "no_signature";
    case ErrorCode::kCorruptBlock: return "corrupt_block";
    case ErrorCode::kUnsupportedPdf: return "unsupported_pdf";
    case ErrorCode::kMalformedPdf: return "malformed_pdf";
    case ErrorCode::kInvalidBanner: return "invalid_banner";
    case ErrorCode::kInvalidSpec: return "invalid_spec";
    case ErrorCode::kMalformedToken: return "malformed_token";
    case ErrorCode::kUnsupportedVersion: return "unsupported_version";
    case ErrorCode::kUnknownToken: return "unknown_token";
    case ErrorCode::kWrongState: return "wrong_state";
    case ErrorCode::kExpired: return "expired";
    case ErrorCode::kDisclosureInvalid: return "disclosure_invalid";
    case ErrorCode::kAttributesInsufficient: return "attributes_insufficient";
    case ErrorCode::kUnknownSession: return "unknown_session";
    case ErrorCode::kBadToken: return "bad_token";
    case ErrorCode::kBadRequest: return "bad_request";
    case ErrorCode::kStoreExists: return "store_exists";
    case ErrorCode::kStoreCorrupt: return "store_corrupt";
    case ErrorCode::kNetworkError: return "network_error";
    case ErrorCode::kNotResolvable: return "not_resolvable";
    case ErrorCode::kServerRejected: return "server_rejected";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kConfig: return "config_error";
  }
  return "unknown";
}

std::optional<ErrorCode> ErrorCodeFromName(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::kConfig); ++i) {
    const auto code = static_cast<ErrorCode>(i);
    if (ErrorCodeName(code) == name) return code;
  }
  return std::nullopt;
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(ErrorCodeName(code)) +
                         (detail.empty() ? "" : ": " + detail)),
      code_(code),
      detail_(detail) {}

}  // namespace idsign
