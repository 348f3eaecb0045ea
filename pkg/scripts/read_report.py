import argparse

from tinydb import Query, TinyDB


def main(report_path, check=None, status=None, limit=None):
    with TinyDB(report_path) as db:
        for meta in db.table("meta").all():
            print(
                f"{meta['command']} {meta['config'].get('family')} "
                f"(version {meta['version']}): {meta['summary']}"
            )
            print()

        # Filter the records by check id and status when asked
        record = Query()
        table = db.table("checks")
        if check is not None and status is not None:
            rows = table.search(
                (record.check == check) & (record.status == status)
            )
        elif check is not None:
            rows = table.search(record.check == check)
        elif status is not None:
            rows = table.search(record.status == status)
        else:
            rows = table.all()

    for row in rows[:limit]:
        print(row)
        print()


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="Print the records of a stored verification report."
    )
    parser.add_argument(
        "-r", "--report_path", help="Path to the TinyDB report file."
    )
    parser.add_argument("-c", "--check", help="Only this check id.")
    parser.add_argument(
        "-s",
        "--status",
        choices=["pass", "fail", "error"],
        help="Only records with this status.",
    )
    parser.add_argument(
        "--limit",
        type=int,
        help="Limit the number of output rows.",
        default=None,
    )
    args = parser.parse_args()

    main(args.report_path, args.check, args.status, args.limit)
