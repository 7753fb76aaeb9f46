# Generated by Django 5.2.5 on 2026-10-19 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='VerificationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(db_index=True, max_length=40)),
                ('argv', models.JSONField(default=list)),
                ('seed', models.BigIntegerField(blank=True, null=True)),
                ('mode', models.CharField(default='exact', max_length=8)),
                ('verdict', models.CharField(choices=[('pass', 'pass'), ('fail', 'fail'), ('Proved', 'Proved'), ('Empty', 'Empty'), ('Unknown', 'Unknown'), ('match', 'match'), ('mismatch', 'mismatch')], max_length=16)),
                ('exit_code', models.PositiveSmallIntegerField(default=0)),
                ('report', models.TextField()),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['created_at', 'id'],
                'indexes': [models.Index(fields=['command', 'created_at'], name='run_command_created_idx')],
            },
        ),
    ]
