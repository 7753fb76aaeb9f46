from django.db import models

# ---------- Run ledger ----------

VERDICT_CHOICES = [
    ("pass", "pass"),
    ("fail", "fail"),
    ("Proved", "Proved"),
    ("Empty", "Empty"),
    ("Unknown", "Unknown"),
    ("match", "match"),
    ("mismatch", "mismatch"),
]


class VerificationRun(models.Model):
    """One recorded invocation: argv, provenance and the exact report bytes."""
    command = models.CharField(max_length=40, db_index=True)
    argv = models.JSONField(default=list)
    seed = models.BigIntegerField(null=True, blank=True)
    mode = models.CharField(max_length=8, default="exact")
    verdict = models.CharField(max_length=16, choices=VERDICT_CHOICES)
    exit_code = models.PositiveSmallIntegerField(default=0)
    report = models.TextField()
    # not part of the report, so replays stay byte-identical
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["created_at", "id"]
        indexes = [models.Index(fields=["command", "created_at"], name="run_command_created_idx")]

    @property
    def passed(self) -> bool:
        return self.exit_code == 0

    def __str__(self):
        return f"#{self.pk} {self.command} -> {self.verdict}"
