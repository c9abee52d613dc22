class VerificationError(RuntimeError):
  """Raised when a computed structure breaks an invariant that holds by construction.

  Lemma failures on an instance are reported as data; this error signals a bug in the
  model itself (for example a median that is not an ultrafilter).
  """
