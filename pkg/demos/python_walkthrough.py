"""Issue a passport credential, prove age over 18, update it, then watch the old one get revoked.

Run with ``python3 demos/python_walkthrough.py [mock|curve]``.
"""

import datetime as dt
import random
import sys

from vcred import (
    Authority,
    Criterion,
    Document,
    Issuer,
    Verifier,
    Wallet,
    age_at_least,
    faith_update,
    setup,
)

TODAY = dt.date(2024, 6, 1)


def main(backend="curve"):
    rng = random.Random(2024)
    pp = setup("standard", backend)
    issuer = Issuer.create(pp, rng, today=TODAY)
    authority = Authority.create(issuer.pk, rng, today=TODAY)
    issuer.authority_key = authority.public_key_bytes()
    epoch = issuer.publish_epoch()
    bar = Verifier(issuer.pk, "bar", epoch)

    wallet = Wallet(issuer.pk, "alice-wallet")
    doc = Document("passport", {"name": "Alice Example", "nationality": "PT", "birthdate": "1990-01-01",
                                "expiry": "2030-01-01", "passport_number": "P12345678"}, wallet.wid)
    auth_request, query = wallet.ask(doc, rng)
    response = authority.respond(auth_request)
    print("authority verdict:", response.verdict)
    cred_id = wallet.receive(issuer.issue(response, query, rng))
    print("credential issued:", cred_id.hex())

    over_18 = Criterion("bar", "passport", ("nationality",), (age_at_least(18, TODAY),))
    pres = wallet.show(cred_id, over_18, epoch, bar.challenge(rng), rng)
    print("bar sees:", dict(pres.disclosed), "->", bar.verify(pres, over_18).reason.value)
    print("same presentation again ->", bar.verify(pres, over_18).reason.value)

    old = wallet.credentials[cred_id]
    new_id = faith_update(wallet, issuer, cred_id, "expiry", "2035-01-01", rng)
    epoch = issuer.publish_epoch()
    bar.update_publication(epoch)
    pres = wallet.show(new_id, over_18, epoch, bar.challenge(rng), rng)
    print("renewed credential ->", bar.verify(pres, over_18).reason.value)

    stale = Wallet(issuer.pk, wallet.wid, credentials={cred_id: old})
    pres = stale.show(cred_id, over_18, epoch, bar.challenge(rng), rng)
    print("superseded credential ->", bar.verify(pres, over_18).reason.value)


if __name__ == "__main__":
    main(*sys.argv[1:])
