const payload = process.env.QL_PAYLOAD || '';
eval(Buffer.from(payload, 'base64').toString());
