// Small CSV reader/writer: quoted fields, escaped quotes, \r\n tolerance.
// The service emits plain comma-separated UTF-8 with a header row.

export interface CsvTable {
    header: string[];
    rows: string[][];
}

export function parseCsv(text: string): CsvTable {
    const records: string[][] = [];
    let field = '';
    let record: string[] = [];
    let inQuotes = false;
    let i = 0;
    const push = () => {
        record.push(field);
        field = '';
    };
    const endRecord = () => {
        push();
        records.push(record);
        record = [];
    };
    while (i < text.length) {
        const ch = text[i];
        if (inQuotes) {
            if (ch === '"') {
                if (text[i + 1] === '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                inQuotes = false;
                i += 1;
                continue;
            }
            field += ch;
            i += 1;
            continue;
        }
        if (ch === '"' && field === '') {
            inQuotes = true;
            i += 1;
        } else if (ch === ',') {
            push();
            i += 1;
        } else if (ch === '\n') {
            endRecord();
            i += 1;
        } else if (ch === '\r') {
            i += 1; // swallow; \n follows in CRLF input
            if (text[i] !== '\n') endRecord();
        } else {
            field += ch;
            i += 1;
        }
    }
    if (field !== '' || record.length > 0) endRecord();
    if (records.length === 0) return { header: [], rows: [] };
    const [header, ...rows] = records;
    return { header, rows };
}

export function toObjects(table: CsvTable): Record<string, string>[] {
    return table.rows.map((row) => {
        const obj: Record<string, string> = {};
        table.header.forEach((name, i) => {
            obj[name] = row[i] ?? '';
        });
        return obj;
    });
}

function quoteField(value: string): string {
    if (/[",\n\r]/.test(value)) return `"${value.replace(/"/g, '""')}"`;
    return value;
}

export function serializeCsv(table: CsvTable): string {
    const lines = [table.header, ...table.rows].map((record) => record.map(quoteField).join(','));
    return lines.join('\n') + '\n';
}
